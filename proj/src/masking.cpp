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

#include "jepatok/masking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jepatok/error.hpp"

namespace jepatok {

std::int64_t MaskRng::uniform(std::int64_t lo, std::int64_t hi) {
  const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return lo + static_cast<std::int64_t>(engine_());
  // Reject the top partial bucket so every value is equally likely.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw > limit);
  return lo + static_cast<std::int64_t>(draw % range);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t row) {
  // splitmix64 finalizer over (seed, row)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (row + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::int64_t effective_span_max(const MaskConfig& cfg, std::int64_t frames) {
  std::int64_t span_max = cfg.span_max;
  if (span_max <= 0) span_max = std::max(cfg.span_min, frames / 4);
  return std::min(span_max, frames);
}

namespace {

void validate(const MaskConfig& cfg, std::int64_t frames) {
  require(frames >= 1, ErrorCode::kConfig, "mask: frame count must be >= 1");
  require(cfg.mask_ratio >= 0.0 && cfg.mask_ratio <= 1.0, ErrorCode::kConfig,
          "mask: ratio must lie in [0, 1], got " +
              std::to_string(cfg.mask_ratio));
  require(cfg.span_min >= 1, ErrorCode::kConfig, "mask: span_min must be >= 1");
  require(cfg.span_max <= 0 || cfg.span_min <= cfg.span_max,
          ErrorCode::kConfig,
          "mask: span_min " + std::to_string(cfg.span_min) +
              " exceeds span_max " + std::to_string(cfg.span_max));
  require(cfg.mask_ratio == 0.0 || cfg.span_min <= frames, ErrorCode::kConfig,
          "mask: span_min " + std::to_string(cfg.span_min) +
              " exceeds sequence length " + std::to_string(frames));
}

}  // namespace

BinaryMask generate_block_mask(std::int64_t frames, const MaskConfig& cfg) {
  validate(cfg, frames);
  BinaryMask mask = BinaryMask::Ones(frames);
  const auto target = static_cast<std::int64_t>(
      std::floor(cfg.mask_ratio * static_cast<double>(frames)));
  if (target == 0) return mask;

  const std::int64_t span_max = effective_span_max(cfg, frames);
  MaskRng rng(cfg.seed);
  std::int64_t counted = 0;
  while (counted < target) {
    std::int64_t length = rng.uniform(cfg.span_min, span_max);
    if (cfg.counting == SpanCounting::kClipToBudget)
      length = std::min(length, std::max(cfg.span_min, target - counted));
    const std::int64_t start = rng.uniform(0, frames - length);
    const std::int64_t end = std::min(start + length, frames);

    std::int64_t fresh = 0;
    for (std::int64_t t = start; t < end; ++t) {
      fresh += mask[t];
      mask[t] = 0;
    }
    counted += cfg.counting == SpanCounting::kPaperCounter ? end - start : fresh;
  }
  return mask;
}

BatchMask generate_block_masks(std::int64_t batch, std::int64_t frames,
                               const MaskConfig& cfg) {
  require(batch >= 1, ErrorCode::kConfig, "mask: batch size must be >= 1");
  validate(cfg, frames);
  BatchMask masks(batch, frames);
  for (std::int64_t b = 0; b < batch; ++b) {
    MaskConfig row_cfg = cfg;
    row_cfg.seed = substream_seed(cfg.seed, static_cast<std::uint64_t>(b));
    masks.row(b) = generate_block_mask(frames, row_cfg).transpose();
  }
  return masks;
}

std::int64_t masked_count(const BinaryMask& mask) {
  return (mask.array() == 0).count();
}

double masked_fraction(const BinaryMask& mask) {
  require(mask.size() >= 1, ErrorCode::kInvalidArgument,
          "masked_fraction: empty mask");
  return static_cast<double>(masked_count(mask)) /
         static_cast<double>(mask.size());
}

}  // namespace jepatok
