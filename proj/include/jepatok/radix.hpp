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
#include <span>
#include <string>
#include <vector>

#include "jepatok/fsq.hpp"
#include "jepatok/types.hpp"

namespace jepatok {

/// Wide enough to hold a group's radix product, which may equal 2^64.
using WideUint = unsigned __int128;

std::string to_string(WideUint value);

/// Product of the radices, or an error if it exceeds 2^64 or a radix is 0.
WideUint radix_product(std::span<const std::uint32_t> radices);

/// Mixed-radix value of `indices` with indices[0] the most significant digit:
/// token = sum_k i_k * prod_{j>k} r_j, evaluated by Horner's rule.
std::uint64_t pack_group(std::span<const std::int32_t> indices,
                         std::span<const std::uint32_t> radices);

/// Exact inverse of pack_group.
std::vector<std::int32_t> unpack_group(std::uint64_t token,
                                       std::span<const std::uint32_t> radices);
void unpack_group(std::uint64_t token, std::span<const std::uint32_t> radices,
                  std::span<std::int32_t> out);

/// Partition of D per-dimension radices into groups of `group_size`, the last
/// group completed with radix-1 pads appended at its end.
class RadixScheme {
 public:
  RadixScheme(std::vector<std::uint32_t> radices, std::size_t group_size);

  std::size_t dims() const { return radices_.size(); }
  std::size_t group_size() const { return group_size_; }
  std::size_t group_count() const { return padded_.size() / group_size_; }
  std::size_t pad_count() const { return padded_.size() - radices_.size(); }

  const std::vector<std::uint32_t>& radices() const { return radices_; }
  std::span<const std::uint32_t> group_radices(std::size_t group) const;
  WideUint group_vocabulary(std::size_t group) const { return vocab_[group]; }
  /// Number of pad digits in the group (nonzero only for the last one).
  std::size_t group_pads(std::size_t group) const;

  /// 16 when every group product is <= 2^16, 32 when <= 2^32, else 64.
  unsigned token_width_bits() const;

  bool operator==(const RadixScheme& other) const {
    return radices_ == other.radices_ && group_size_ == other.group_size_;
  }

 private:
  std::vector<std::uint32_t> radices_;
  std::vector<std::uint32_t> padded_;
  std::vector<WideUint> vocab_;
  std::size_t group_size_;
};

RadixScheme build_scheme(const FsqLevels& levels, std::size_t group_size = 7);

struct TokenRate {
  double frame_rate_hz;
  double tokens_per_second;
};

TokenRate token_rate(double sample_rate, std::int64_t hop, std::size_t groups);

/// One frame of D indices -> group_count tokens. Pads carry index 0.
std::vector<std::uint64_t> pack_frame(std::span<const std::int32_t> indices,
                                      const RadixScheme& scheme);
/// Inverse of pack_frame; pad digits are dropped.
std::vector<std::int32_t> unpack_frame(std::span<const std::uint64_t> tokens,
                                       const RadixScheme& scheme);

/// [D x T] indices -> [T x groups] tokens.
TokenMatrix pack_frames(const IndexMatrix& indices, const RadixScheme& scheme);
/// [T x groups] tokens -> [D x T] indices. Errors name the frame and group.
IndexMatrix unpack_frames(const TokenMatrix& tokens, const RadixScheme& scheme);

struct TokenStream {
  TokenMatrix tokens;  // [frames x groups]
  RadixScheme scheme;
  double frame_rate_hz;

  double tokens_per_second() const {
    return frame_rate_hz * static_cast<double>(scheme.group_count());
  }
};

}  // namespace jepatok
