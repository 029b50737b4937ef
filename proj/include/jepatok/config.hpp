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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "jepatok/daam.hpp"
#include "jepatok/fsq.hpp"
#include "jepatok/losses.hpp"
#include "jepatok/masking.hpp"

namespace jepatok {

/// Settings shared by the CLI subcommands. Defaults reproduce the reference
/// tokenizer: 24 kHz audio, hop 9600, 128 dimensions of 4 levels, groups of 7.
struct CodecConfig {
  double sample_rate = 24000.0;
  std::int64_t hop = 9600;
  FsqLevels levels = FsqLevels::uniform();
  std::size_t group_size = 7;
  LossWeights weights;
  /// Accepted and stored; no quantizer formula reads it.
  double fsq_temperature = 1.0;
  DaamParams<double> daam = DaamParams<double>::defaults(4);
  MaskConfig mask;
};

/// Parses the flat `key = value` format. Arrays are written `[a, b, c]`;
/// `#` starts a comment. Unknown keys are rejected.
///
/// Keys: sample_rate, hop, levels, code_dim, group_size, lambda_stft,
/// lambda_gan, fsq.temperature, daam.k, daam.alpha, daam.delta, daam.nu,
/// mask.ratio, mask.span_min, mask.span_max (integer or `auto`), mask.seed.
/// A single-entry `levels` together with `code_dim` replicates that level.
CodecConfig parse_config(std::string_view text);

CodecConfig load_config(const std::filesystem::path& path);

}  // namespace jepatok
