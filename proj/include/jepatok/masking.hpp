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
#include <random>

#include "jepatok/types.hpp"

namespace jepatok {

/// How the span loop decides it has masked enough positions.
enum class SpanCounting {
  /// Count newly masked positions, and clip each sampled span length to
  /// max(span_min, remaining budget). Masked count lands in
  /// [floor(rho*T), floor(rho*T) + span_min - 1].
  kClipToBudget,
  /// Count newly masked positions; spans are never clipped, so the last span
  /// may overshoot by up to span_max - 1.
  kNewPositions,
  /// Add (t_end - t_start) for every span even when it overlaps earlier ones.
  /// Overlaps can leave fewer than floor(rho*T) positions masked.
  kPaperCounter,
};

struct MaskConfig {
  double mask_ratio = 0.5;
  std::int64_t span_min = 2;
  /// <= 0 selects the adaptive rule span_max = floor(T/4), raised to span_min
  /// when T is too short for it.
  std::int64_t span_max = 0;
  std::uint64_t seed = 0;
  SpanCounting counting = SpanCounting::kClipToBudget;
};

/// Platform-independent generator used for all masks: std::mt19937_64 (its
/// output sequence is fixed by the standard) with rejection-sampled bounded
/// integers, so identical seeds give identical masks everywhere.
class MaskRng {
 public:
  explicit MaskRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

/// Seed for batch row `row`; rows draw from independent substreams.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t row);

/// Resolved span_max for a sequence of length T (adaptive rule and min(., T)).
std::int64_t effective_span_max(const MaskConfig& cfg, std::int64_t frames);

BinaryMask generate_block_mask(std::int64_t frames, const MaskConfig& cfg);

/// Row b is generate_block_mask with seed substream_seed(cfg.seed, b).
BatchMask generate_block_masks(std::int64_t batch, std::int64_t frames,
                               const MaskConfig& cfg);

std::int64_t masked_count(const BinaryMask& mask);
double masked_fraction(const BinaryMask& mask);

}  // namespace jepatok
