// Copyright 2026 The jepatok Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "jepatok/error.hpp"

namespace jepatok {

/// Process exit codes of the `jepatok` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitBadConfig = 2,
  kExitMalformedInput = 3,
  kExitValidation = 4,
  kExitIo = 5,
};

int exit_code_for(ErrorCode code);

/// Runs the tool with `args` (args[0] is the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jepatok
