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

#include "jepatok/io.hpp"

#include <bit>
#include <fstream>
#include <cmath>
#include <iterator>
#include <optional>

#include "jepatok/error.hpp"

namespace jepatok {

namespace {

constexpr std::string_view kFeatureMagic = "JDF1";
constexpr std::string_view kTokenMagic = "JDT1";

class ByteWriter {
 public:
  void raw(std::string_view s) { out_.append(s); }

  template <typename UInt>
  void le(UInt v) {
    for (std::size_t i = 0; i < sizeof(UInt); ++i)
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, const char* what) : bytes_(bytes), what_(what) {}

  std::string_view raw(std::size_t n) {
    need(n);
    const auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  template <typename UInt>
  UInt le() {
    need(sizeof(UInt));
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i)
      v |= static_cast<UInt>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(UInt);
    return v;
  }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }

  std::size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] void fail(const std::string& msg) const {
    raise(ErrorCode::kMalformedInput, std::string(what_) + ": " + msg);
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) fail("truncated at byte " + std::to_string(pos_));
  }

  std::string_view bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_feature_file(const FeatureFile& file) {
  ByteWriter w;
  w.raw(kFeatureMagic);
  w.le<std::uint32_t>(kFormatVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(file.data.rows()));
  w.le<std::uint64_t>(static_cast<std::uint64_t>(file.data.cols()));
  w.f64(file.frame_rate_hz);
  for (Eigen::Index c = 0; c < file.data.rows(); ++c)
    for (Eigen::Index t = 0; t < file.data.cols(); ++t) w.f32(file.data(c, t));
  return w.take();
}

FeatureFile decode_feature_file(std::string_view bytes) {
  ByteReader r(bytes, "feature file");
  if (r.raw(4) != kFeatureMagic) r.fail("bad magic (expected JDF1)");
  if (const auto v = r.le<std::uint32_t>(); v != kFormatVersion)
    r.fail("unsupported version " + std::to_string(v));
  const auto channels = r.le<std::uint32_t>();
  const auto frames = r.le<std::uint64_t>();
  FeatureFile file;
  file.frame_rate_hz = r.f64();
  if (!std::isfinite(file.frame_rate_hz) || file.frame_rate_hz < 0)
    r.fail("invalid frame rate");
  if (channels != 0 && frames > r.remaining() / 4 / channels)
    r.fail("payload shorter than header declares");
  if (r.remaining() != std::uint64_t{4} * channels * frames)
    r.fail("payload is " + std::to_string(r.remaining()) + " bytes, header declares " +
           std::to_string(std::uint64_t{4} * channels * frames));
  file.data.resize(channels, static_cast<Eigen::Index>(frames));
  for (Eigen::Index c = 0; c < file.data.rows(); ++c)
    for (Eigen::Index t = 0; t < file.data.cols(); ++t) file.data(c, t) = r.f32();
  return file;
}

std::string encode_token_file(const TokenStream& stream) {
  const RadixScheme& scheme = stream.scheme;
  const unsigned width = scheme.token_width_bits();
  require(width <= 32, ErrorCode::kConfig,
          "token file: group vocabularies above 2^32 do not fit a 32-bit token; "
          "use a smaller group size");
  for (auto r : scheme.radices())
    require(r <= 0xffff, ErrorCode::kConfig, "token file: radices must fit in 16 bits");
  require(stream.tokens.cols() == static_cast<Eigen::Index>(scheme.group_count()),
          ErrorCode::kInvalidArgument, "token file: token matrix has wrong group count");

  ByteWriter w;
  w.raw(kTokenMagic);
  w.le<std::uint32_t>(kFormatVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(scheme.group_count()));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(scheme.group_size()));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(scheme.dims()));
  for (auto r : scheme.radices()) w.le<std::uint16_t>(static_cast<std::uint16_t>(r));
  w.le<std::uint32_t>(width);
  w.le<std::uint64_t>(static_cast<std::uint64_t>(stream.tokens.rows()));
  w.f64(stream.frame_rate_hz);
  for (Eigen::Index t = 0; t < stream.tokens.rows(); ++t) {
    for (Eigen::Index g = 0; g < stream.tokens.cols(); ++g) {
      const std::uint64_t token = stream.tokens(t, g);
      const WideUint vocab = scheme.group_vocabulary(static_cast<std::size_t>(g));
      require(WideUint(token) < vocab, ErrorCode::kOutOfRange,
              "token file: token " + std::to_string(token) + " at frame " +
                  std::to_string(t) + ", group " + std::to_string(g) +
                  " exceeds vocabulary " + to_string(vocab));
      if (width == 16)
        w.le<std::uint16_t>(static_cast<std::uint16_t>(token));
      else
        w.le<std::uint32_t>(static_cast<std::uint32_t>(token));
    }
  }
  return w.take();
}

TokenStream decode_token_file(std::string_view bytes) {
  ByteReader r(bytes, "token file");
  if (r.raw(4) != kTokenMagic) r.fail("bad magic (expected JDT1)");
  if (const auto v = r.le<std::uint32_t>(); v != kFormatVersion)
    r.fail("unsupported version " + std::to_string(v));
  const auto groups = r.le<std::uint32_t>();
  const auto group_size = r.le<std::uint32_t>();
  const auto dims = r.le<std::uint32_t>();
  if (dims == 0 || group_size == 0) r.fail("zero dimensions or group size");
  if (r.remaining() < std::uint64_t{2} * dims) r.fail("truncated radix table");
  std::vector<std::uint32_t> radices(dims);
  for (auto& radix : radices) {
    radix = r.le<std::uint16_t>();
    if (radix == 0) r.fail("radix 0 in radix table");
  }
  std::optional<RadixScheme> scheme;
  try {
    scheme.emplace(std::move(radices), group_size);
  } catch (const Error& e) {
    r.fail(e.what());
  }
  if (scheme->group_count() != groups)
    r.fail("header declares " + std::to_string(groups) + " groups, radix table implies " +
           std::to_string(scheme->group_count()));
  const auto width = r.le<std::uint32_t>();
  if (width != scheme->token_width_bits())
    r.fail("token width " + std::to_string(width) + " does not match scheme width " +
           std::to_string(scheme->token_width_bits()));
  const auto frames = r.le<std::uint64_t>();
  const double frame_rate = r.f64();
  if (!std::isfinite(frame_rate) || frame_rate < 0) r.fail("invalid frame rate");
  const std::uint64_t per_frame = std::uint64_t{groups} * (width / 8);
  if (frames > r.remaining() / per_frame) r.fail("payload shorter than header declares");
  if (r.remaining() != frames * per_frame)
    r.fail("payload is " + std::to_string(r.remaining()) + " bytes, header declares " +
           std::to_string(frames * per_frame));

  TokenMatrix tokens(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(groups));
  for (Eigen::Index t = 0; t < tokens.rows(); ++t)
    for (Eigen::Index g = 0; g < tokens.cols(); ++g)
      tokens(t, g) = width == 16 ? r.le<std::uint16_t>() : r.le<std::uint32_t>();
  return TokenStream{std::move(tokens), std::move(*scheme), frame_rate};
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIo, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) raise(ErrorCode::kIo, "read failed on " + path.string());
  return bytes;
}

void write_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) raise(ErrorCode::kIo, "write failed on " + path.string());
}

FeatureFile read_feature_file(const std::filesystem::path& path) {
  return decode_feature_file(read_bytes(path));
}

void write_feature_file(const std::filesystem::path& path, const FeatureFile& file) {
  write_bytes(path, encode_feature_file(file));
}

TokenStream read_token_file(const std::filesystem::path& path) {
  return decode_token_file(read_bytes(path));
}

void write_token_file(const std::filesystem::path& path, const TokenStream& stream) {
  write_bytes(path, encode_token_file(stream));
}

}  // namespace jepatok
