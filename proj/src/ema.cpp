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

#include "jepatok/ema.hpp"

#include <cmath>

#include "jepatok/error.hpp"

namespace jepatok {

ParamSet ema_update(const ParamSet& target, const ParamSet& online, double tau) {
  require(tau >= 0.0 && tau <= 1.0, ErrorCode::kInvalidArgument,
          "ema_update: tau must lie in [0, 1]");
  require(target.size() == online.size(), ErrorCode::kInvalidArgument,
          "ema_update: parameter sets differ in size");
  ParamSet out;
  for (const auto& [name, t] : target) {
    const auto it = online.find(name);
    require(it != online.end(), ErrorCode::kInvalidArgument,
            "ema_update: parameter '" + name + "' missing from online set");
    require(it->second.size() == t.size(), ErrorCode::kInvalidArgument,
            "ema_update: parameter '" + name + "' has length " +
                std::to_string(t.size()) + " vs " + std::to_string(it->second.size()));
    out.emplace(name, tau * t + (1.0 - tau) * it->second);
  }
  return out;
}

CollapseReport collapse_std(const std::vector<FeaturesD>& pred, double threshold) {
  require(!pred.empty(), ErrorCode::kInvalidArgument, "collapse_std: empty batch");
  const Eigen::Index channels = pred.front().rows();
  Eigen::Index samples = 0;
  for (const auto& p : pred) {
    require(p.rows() == channels, ErrorCode::kInvalidArgument,
            "collapse_std: channel count differs across the batch");
    samples += p.cols();
  }
  require(samples >= 2 && channels >= 1, ErrorCode::kInvalidArgument,
          "collapse_std: need at least 2 samples per channel");

  SignalD mean = SignalD::Zero(channels);
  for (const auto& p : pred) mean += p.rowwise().sum();
  mean /= static_cast<double>(samples);

  SignalD sq = SignalD::Zero(channels);
  for (const auto& p : pred) sq += (p.colwise() - mean).array().square().rowwise().sum().matrix();
  const double mean_std = (sq / static_cast<double>(samples)).array().sqrt().mean();
  return {mean_std, mean_std < threshold};
}

}  // namespace jepatok
