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

#include "jepatok/radix.hpp"

#include <algorithm>
#include <limits>

#include "jepatok/error.hpp"

namespace jepatok {

namespace {

constexpr WideUint kTwoTo64 = WideUint(1) << 64;

std::uint64_t pack_unchecked(std::span<const std::int32_t> indices,
                             std::span<const std::uint32_t> radices,
                             std::size_t count) {
  std::uint64_t token = 0;
  for (std::size_t k = 0; k < count; ++k)
    token = token * radices[k] + static_cast<std::uint32_t>(indices[k]);
  return token;
}

void check_index(std::int32_t index, std::uint32_t radix, std::size_t position,
                 const char* op) {
  if (index < 0 || static_cast<std::uint32_t>(index) >= radix)
    raise(ErrorCode::kOutOfRange,
          std::string(op) + ": index " + std::to_string(index) + " at position " +
              std::to_string(position) + " outside radix " + std::to_string(radix));
}

}  // namespace

std::string to_string(WideUint value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

WideUint radix_product(std::span<const std::uint32_t> radices) {
  WideUint product = 1;
  for (std::size_t k = 0; k < radices.size(); ++k) {
    require(radices[k] >= 1, ErrorCode::kConfig,
            "radix at position " + std::to_string(k) + " must be >= 1");
    product *= radices[k];
    require(product <= kTwoTo64, ErrorCode::kConfig,
            "radix product exceeds 2^64; use a smaller group size");
  }
  return product;
}

std::uint64_t pack_group(std::span<const std::int32_t> indices,
                         std::span<const std::uint32_t> radices) {
  require(indices.size() == radices.size(), ErrorCode::kInvalidArgument,
          "pack_group: " + std::to_string(indices.size()) + " indices for " +
              std::to_string(radices.size()) + " radices");
  radix_product(radices);
  for (std::size_t k = 0; k < indices.size(); ++k)
    check_index(indices[k], radices[k], k, "pack_group");
  return pack_unchecked(indices, radices, indices.size());
}

void unpack_group(std::uint64_t token, std::span<const std::uint32_t> radices,
                  std::span<std::int32_t> out) {
  require(out.size() == radices.size(), ErrorCode::kInvalidArgument,
          "unpack_group: output size mismatch");
  const WideUint product = radix_product(radices);
  require(WideUint(token) < product, ErrorCode::kOutOfRange,
          "unpack_group: token " + std::to_string(token) +
              " not below radix product " + to_string(product));
  // Peel the least significant digit first; avoids forming prod_{j>k} r_j,
  // which can reach 2^64 when leading radices are 1.
  for (std::size_t k = radices.size(); k-- > 0;) {
    out[k] = static_cast<std::int32_t>(token % radices[k]);
    token /= radices[k];
  }
}

std::vector<std::int32_t> unpack_group(std::uint64_t token,
                                       std::span<const std::uint32_t> radices) {
  std::vector<std::int32_t> out(radices.size());
  unpack_group(token, radices, out);
  return out;
}

RadixScheme::RadixScheme(std::vector<std::uint32_t> radices, std::size_t group_size)
    : radices_(std::move(radices)), group_size_(group_size) {
  require(group_size_ >= 1, ErrorCode::kConfig, "group size must be >= 1");
  require(!radices_.empty(), ErrorCode::kConfig, "scheme needs at least one radix");
  const std::size_t groups = (radices_.size() + group_size_ - 1) / group_size_;
  padded_ = radices_;
  padded_.resize(groups * group_size_, 1);
  vocab_.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    try {
      vocab_.push_back(radix_product(group_radices(g)));
    } catch (const Error&) {
      raise(ErrorCode::kConfig,
            "radix product of group " + std::to_string(g) + " exceeds 2^64 with group size " +
                std::to_string(group_size_) + "; use a smaller group size");
    }
  }
}

std::span<const std::uint32_t> RadixScheme::group_radices(std::size_t group) const {
  return std::span<const std::uint32_t>(padded_).subspan(group * group_size_, group_size_);
}

std::size_t RadixScheme::group_pads(std::size_t group) const {
  const std::size_t end = (group + 1) * group_size_;
  return end > radices_.size() ? std::min(end - radices_.size(), group_size_) : 0;
}

unsigned RadixScheme::token_width_bits() const {
  const WideUint widest = *std::max_element(vocab_.begin(), vocab_.end());
  if (widest <= (WideUint(1) << 16)) return 16;
  if (widest <= (WideUint(1) << 32)) return 32;
  return 64;
}

RadixScheme build_scheme(const FsqLevels& levels, std::size_t group_size) {
  levels.validate();
  std::vector<std::uint32_t> radices(levels.levels.begin(), levels.levels.end());
  return RadixScheme(std::move(radices), group_size);
}

TokenRate token_rate(double sample_rate, std::int64_t hop, std::size_t groups) {
  require(hop >= 1, ErrorCode::kConfig, "token_rate: hop must be >= 1");
  require(sample_rate >= 1, ErrorCode::kConfig, "token_rate: sample rate must be >= 1");
  const double frame_rate = sample_rate / static_cast<double>(hop);
  return {frame_rate, frame_rate * static_cast<double>(groups)};
}

std::vector<std::uint64_t> pack_frame(std::span<const std::int32_t> indices,
                                      const RadixScheme& scheme) {
  require(indices.size() == scheme.dims(), ErrorCode::kInvalidArgument,
          "pack_frame: frame has " + std::to_string(indices.size()) +
              " indices, scheme expects " + std::to_string(scheme.dims()));
  for (std::size_t d = 0; d < indices.size(); ++d)
    check_index(indices[d], scheme.radices()[d], d, "pack_frame");

  std::vector<std::uint64_t> tokens(scheme.group_count());
  const std::size_t g_size = scheme.group_size();
  for (std::size_t g = 0; g < tokens.size(); ++g) {
    // Trailing pads are radix 1 / index 0 and leave the value unchanged.
    const std::size_t real = g_size - scheme.group_pads(g);
    tokens[g] = pack_unchecked(indices.subspan(g * g_size, real),
                               scheme.group_radices(g), real);
  }
  return tokens;
}

std::vector<std::int32_t> unpack_frame(std::span<const std::uint64_t> tokens,
                                       const RadixScheme& scheme) {
  require(tokens.size() == scheme.group_count(), ErrorCode::kInvalidArgument,
          "unpack_frame: frame has " + std::to_string(tokens.size()) +
              " tokens, scheme expects " + std::to_string(scheme.group_count()));
  const std::size_t g_size = scheme.group_size();
  std::vector<std::int32_t> digits(tokens.size() * g_size);
  for (std::size_t g = 0; g < tokens.size(); ++g) {
    try {
      unpack_group(tokens[g], scheme.group_radices(g),
                   std::span<std::int32_t>(digits).subspan(g * g_size, g_size));
    } catch (const Error& e) {
      raise(e.code(), "group " + std::to_string(g) + ": " + e.what());
    }
  }
  digits.resize(scheme.dims());
  return digits;
}

TokenMatrix pack_frames(const IndexMatrix& indices, const RadixScheme& scheme) {
  require(indices.rows() == static_cast<Eigen::Index>(scheme.dims()),
          ErrorCode::kInvalidArgument,
          "pack_frames: indices have " + std::to_string(indices.rows()) +
              " rows, scheme expects " + std::to_string(scheme.dims()));
  TokenMatrix tokens(indices.cols(), static_cast<Eigen::Index>(scheme.group_count()));
  std::vector<std::int32_t> frame(scheme.dims());
  for (Eigen::Index t = 0; t < indices.cols(); ++t) {
    Eigen::Map<Signal<std::int32_t>>(frame.data(), indices.rows()) = indices.col(t);
    try {
      const auto packed = pack_frame(frame, scheme);
      for (std::size_t g = 0; g < packed.size(); ++g)
        tokens(t, static_cast<Eigen::Index>(g)) = packed[g];
    } catch (const Error& e) {
      raise(e.code(), "frame " + std::to_string(t) + ": " + e.what());
    }
  }
  return tokens;
}

IndexMatrix unpack_frames(const TokenMatrix& tokens, const RadixScheme& scheme) {
  require(tokens.cols() == static_cast<Eigen::Index>(scheme.group_count()),
          ErrorCode::kInvalidArgument, "unpack_frames: group count mismatch");
  IndexMatrix indices(static_cast<Eigen::Index>(scheme.dims()), tokens.rows());
  std::vector<std::uint64_t> frame(scheme.group_count());
  for (Eigen::Index t = 0; t < tokens.rows(); ++t) {
    for (std::size_t g = 0; g < frame.size(); ++g)
      frame[g] = tokens(t, static_cast<Eigen::Index>(g));
    try {
      const auto digits = unpack_frame(frame, scheme);
      indices.col(t) = Eigen::Map<const Signal<std::int32_t>>(digits.data(), indices.rows());
    } catch (const Error& e) {
      raise(e.code(), "frame " + std::to_string(t) + ": " + e.what());
    }
  }
  return indices;
}

}  // namespace jepatok
