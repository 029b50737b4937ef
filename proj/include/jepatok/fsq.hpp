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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "jepatok/error.hpp"
#include "jepatok/types.hpp"

namespace jepatok {

/// Quantization levels per code dimension.
struct FsqLevels {
  std::vector<std::int32_t> levels;

  /// `dims` dimensions, each with `level` levels (default 128 x 4).
  static FsqLevels uniform(std::size_t dims = 128, std::int32_t level = 4) {
    return FsqLevels{std::vector<std::int32_t>(dims, level)};
  }

  Eigen::Index dims() const { return static_cast<Eigen::Index>(levels.size()); }
  std::int32_t operator[](Eigen::Index d) const { return levels[static_cast<std::size_t>(d)]; }

  void validate() const {
    require(!levels.empty(), ErrorCode::kConfig, "fsq: need at least one dimension");
    for (std::size_t d = 0; d < levels.size(); ++d)
      require(levels[d] >= 1, ErrorCode::kConfig,
              "fsq: level for dimension " + std::to_string(d) + " must be >= 1, got " +
                  std::to_string(levels[d]));
  }
};

/// Boundary value i of an L-level lattice: (2i - L + 1) / L.
template <typename Scalar>
Scalar fsq_boundary(std::int32_t level, std::int32_t index) {
  return Scalar(2 * index - level + 1) / Scalar(level);
}

template <typename Scalar = double>
Signal<Scalar> fsq_boundaries(std::int32_t level) {
  require(level >= 1, ErrorCode::kInvalidArgument,
          "fsq_boundaries: level must be >= 1, got " + std::to_string(level));
  Signal<Scalar> b(level);
  for (std::int32_t i = 0; i < level; ++i) b[i] = fsq_boundary<Scalar>(level, i);
  return b;
}

/// Index of the nearest boundary to an already-projected value. Exact
/// midpoints resolve to the lower index.
template <typename Scalar>
std::int32_t fsq_nearest(Scalar value, std::int32_t level) {
  // Analytic guess, then settle against the real distances.
  const Scalar pos = (value * Scalar(level) + Scalar(level - 1)) / Scalar(2);
  Scalar guess = std::ceil(pos - Scalar(0.5));
  guess = std::min<Scalar>(std::max<Scalar>(guess, Scalar(0)), Scalar(level - 1));
  auto i = static_cast<std::int32_t>(guess);
  auto dist = [&](std::int32_t j) { return std::abs(value - fsq_boundary<Scalar>(level, j)); };
  while (i > 0 && dist(i - 1) <= dist(i)) --i;
  while (i + 1 < level && dist(i + 1) < dist(i)) ++i;
  return i;
}

template <typename Scalar>
struct FsqResult {
  IndexMatrix indices;   // [D x T]
  Features<Scalar> values;  // [D x T], boundary values
};

/// Quantizes values that are already in tanh space (no projection applied).
template <typename Scalar>
FsqResult<Scalar> fsq_quantize_projected(const Features<Scalar>& projected,
                                         const FsqLevels& levels) {
  levels.validate();
  require(projected.rows() == levels.dims(), ErrorCode::kInvalidArgument,
          "fsq: input has " + std::to_string(projected.rows()) +
              " channels, levels describe " + std::to_string(levels.dims()));
  require(projected.allFinite(), ErrorCode::kInvalidArgument,
          "fsq: non-finite input");
  FsqResult<Scalar> out{IndexMatrix(projected.rows(), projected.cols()),
                        Features<Scalar>(projected.rows(), projected.cols())};
  for (Eigen::Index t = 0; t < projected.cols(); ++t) {
    for (Eigen::Index d = 0; d < projected.rows(); ++d) {
      const std::int32_t i = fsq_nearest(projected(d, t), levels[d]);
      out.indices(d, t) = i;
      out.values(d, t) = fsq_boundary<Scalar>(levels[d], i);
    }
  }
  return out;
}

/// tanh projection followed by nearest-boundary quantization.
template <typename Scalar>
FsqResult<Scalar> fsq_quantize(const Features<Scalar>& z_e, const FsqLevels& levels) {
  require(z_e.allFinite(), ErrorCode::kInvalidArgument, "fsq: non-finite input");
  return fsq_quantize_projected<Scalar>(z_e.array().tanh().matrix(), levels);
}

template <typename Scalar = double>
Features<Scalar> fsq_dequantize(const IndexMatrix& indices, const FsqLevels& levels) {
  levels.validate();
  require(indices.rows() == levels.dims(), ErrorCode::kInvalidArgument,
          "fsq_dequantize: indices have " + std::to_string(indices.rows()) +
              " rows, levels describe " + std::to_string(levels.dims()));
  Features<Scalar> out(indices.rows(), indices.cols());
  for (Eigen::Index t = 0; t < indices.cols(); ++t) {
    for (Eigen::Index d = 0; d < indices.rows(); ++d) {
      const std::int32_t i = indices(d, t);
      if (i < 0 || i >= levels[d])
        raise(ErrorCode::kOutOfRange,
              "fsq_dequantize: index " + std::to_string(i) + " at (d=" +
                  std::to_string(d) + ", t=" + std::to_string(t) +
                  ") outside [0, " + std::to_string(levels[d]) + ")");
      out(d, t) = fsq_boundary<Scalar>(levels[d], i);
    }
  }
  return out;
}

/// Straight-through estimator: dL/dz_e = dL/dz_q. The pass-through point
/// sits after the tanh projection.
template <typename Derived>
typename Derived::PlainObject straight_through(const Eigen::MatrixBase<Derived>& grad) {
  return grad;
}

}  // namespace jepatok
