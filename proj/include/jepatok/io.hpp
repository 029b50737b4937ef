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

#include "jepatok/radix.hpp"
#include "jepatok/types.hpp"

namespace jepatok {

/// Feature file ("JDF1"), all fields little-endian:
///   magic[4] | version u32 | channels u32 | frames u64 | frame_rate f64 |
///   channels*frames f32, channel-major
/// Mono waveforms use the same layout with channels = 1 and the sample rate
/// in the frame_rate field.
struct FeatureFile {
  FeaturesF data;  // [C x T]
  double frame_rate_hz = 0.0;
};

/// Token file ("JDT1"), all fields little-endian:
///   magic[4] | version u32 | groups u32 | group_size u32 | dims u32 |
///   dims * radix u16 | token_width u32 (16 or 32) | frames u64 |
///   frame_rate f64 | frames*groups tokens of token_width bits, frame-major
inline constexpr std::uint32_t kFormatVersion = 1;

std::string encode_feature_file(const FeatureFile& file);
FeatureFile decode_feature_file(std::string_view bytes);

std::string encode_token_file(const TokenStream& stream);
/// Parses and checks the header; token values are not range-checked here.
TokenStream decode_token_file(std::string_view bytes);

std::string read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::string_view bytes);

FeatureFile read_feature_file(const std::filesystem::path& path);
void write_feature_file(const std::filesystem::path& path, const FeatureFile& file);
TokenStream read_token_file(const std::filesystem::path& path);
void write_token_file(const std::filesystem::path& path, const TokenStream& stream);

}  // namespace jepatok
