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

#include <Eigen/Dense>

namespace jepatok {

// Feature tensors are stored channel-major: one row per channel, one column
// per frame. Batched data is a std::vector of these.
template <typename Scalar>
using Features = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Signal = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using FeaturesF = Features<float>;
using FeaturesD = Features<double>;
using SignalF = Signal<float>;
using SignalD = Signal<double>;

/// Per-dimension FSQ indices, [D x T].
using IndexMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Packed tokens, [frames x groups].
using TokenMatrix = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// 1 = visible (context), 0 = masked (target).
using BinaryMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

/// One mask per row, [B x T].
using BatchMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic,
                                Eigen::RowMajor>;

}  // namespace jepatok
