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

#include <map>
#include <string>
#include <vector>

#include "jepatok/types.hpp"

namespace jepatok {

/// Named flat parameter vectors.
using ParamSet = std::map<std::string, SignalD>;

/// tau * target + (1 - tau) * online, elementwise. Inputs are not modified.
ParamSet ema_update(const ParamSet& target, const ParamSet& online, double tau = 0.996);

struct CollapseReport {
  double mean_std;
  bool warn;
};

/// Per-channel population std over the pooled batch x time axis, averaged
/// over channels. `warn` is mean_std < threshold. Each batch entry is [C x T].
CollapseReport collapse_std(const std::vector<FeaturesD>& pred, double threshold = 0.01);

}  // namespace jepatok
