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

#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include <unistd.h>

#include "jepatok/cli.hpp"
#include "jepatok/fsq.hpp"
#include "jepatok/io.hpp"

using namespace jepatok;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "jepatok");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("jepatok_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

FeatureFile random_features(std::uint64_t seed, Eigen::Index channels, Eigen::Index frames) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<float> normal(0.0f, 1.5f);
  FeatureFile f{FeaturesF(channels, frames), 2.5};
  for (auto& v : f.data.reshaped()) v = normal(gen);
  return f;
}

FeatureFile waveform(std::uint64_t seed, Eigen::Index samples, float gain = 1.0f) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<float> normal(0.0f, 0.3f);
  FeatureFile f{FeaturesF(1, samples), 24000.0};
  for (auto& v : f.data.reshaped()) v = gain * normal(gen);
  return f;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("tokenize a 10-frame file with defaults") {
  TempDir dir;
  write_feature_file(dir / "f.jdf", random_features(1, 128, 10));
  const auto r = run({"tokenize", "--in", dir / "f.jdf", "--out", dir / "t.jdt"});
  REQUIRE(r.code == kExitOk);
  CHECK(contains(r.out, "frames: 10"));
  CHECK(contains(r.out, "47.5 tokens/sec"));
  CHECK(contains(r.out, "16384 x 18, 16 x 1"));

  const auto stream = read_token_file(dir / "t.jdt");
  CHECK(stream.tokens.rows() == 10);
  CHECK(stream.tokens.cols() == 19);

  // Same tokens as the library path.
  const auto f = read_feature_file(dir / "f.jdf");
  const auto q = fsq_quantize(FeaturesD(f.data.cast<double>()), FsqLevels::uniform());
  CHECK(stream.tokens == pack_frames(q.indices, stream.scheme));
}

TEST_CASE("empty feature file gives an empty token file") {
  TempDir dir;
  write_feature_file(dir / "f.jdf", FeatureFile{FeaturesF(128, 0), 2.5});
  const auto r = run({"tokenize", "--in", dir / "f.jdf", "--out", dir / "t.jdt"});
  REQUIRE(r.code == kExitOk);
  CHECK(contains(r.out, "frames: 0"));
  CHECK(read_token_file(dir / "t.jdt").tokens.rows() == 0);
}

TEST_CASE("tokenize error paths") {
  TempDir dir;
  write_feature_file(dir / "f.jdf", random_features(2, 128, 3));
  std::string bytes = read_bytes(dir / "f.jdf");
  bytes[1] = 'X';
  write_bytes(dir / "bad.jdf", bytes);

  auto r = run({"tokenize", "--in", dir / "bad.jdf", "--out", dir / "t.jdt"});
  CHECK(r.code == kExitMalformedInput);
  CHECK_FALSE(fs::exists(dir / "t.jdt"));
  CHECK(contains(r.err, "magic"));

  write_feature_file(dir / "narrow.jdf", random_features(3, 64, 3));
  r = run({"tokenize", "--in", dir / "narrow.jdf", "--out", dir / "t.jdt"});
  CHECK(r.code == kExitValidation);
  CHECK(contains(r.err, "64 channels"));

  r = run({"tokenize", "--in", dir / "missing.jdf", "--out", dir / "t.jdt"});
  CHECK(r.code == kExitIo);

  r = run({"tokenize", "--in", dir / "f.jdf", "--out", dir / "no/such/dir/t.jdt"});
  CHECK(r.code == kExitIo);

  write_bytes(dir / "bad.conf", "levels = [4, 4, nope]\n");
  r = run({"tokenize", "--config", dir / "bad.conf", "--in", dir / "f.jdf", "--out", dir / "t.jdt"});
  CHECK(r.code == kExitBadConfig);

  r = run({"tokenize", "--config", dir / "absent.conf", "--in", dir / "f.jdf", "--out", dir / "t.jdt"});
  CHECK(r.code == kExitBadConfig);

  r = run({"tokenize", "--in", dir / "f.jdf"});
  CHECK(r.code == kExitUsage);
}

TEST_CASE("detokenize then tokenize is bit-exact") {
  TempDir dir;
  write_feature_file(dir / "f.jdf", random_features(4, 128, 200));
  REQUIRE(run({"tokenize", "--in", dir / "f.jdf", "--out", dir / "a.jdt"}).code == kExitOk);
  REQUIRE(run({"detokenize", "--in", dir / "a.jdt", "--out", dir / "q.jdf"}).code == kExitOk);
  REQUIRE(run({"tokenize", "--in", dir / "q.jdf", "--out", dir / "b.jdt"}).code == kExitOk);
  CHECK(read_bytes(dir / "a.jdt") == read_bytes(dir / "b.jdt"));
  REQUIRE(run({"detokenize", "--in", dir / "b.jdt", "--out", dir / "q2.jdf"}).code == kExitOk);
  CHECK(read_bytes(dir / "q.jdf") == read_bytes(dir / "q2.jdf"));

  const auto q = read_feature_file(dir / "q.jdf");
  CHECK(q.frame_rate_hz == 2.5);
  for (float v : q.data.reshaped()) CHECK((v == -0.75f || v == -0.25f || v == 0.25f || v == 0.75f));
}

TEST_CASE("projected input skips tanh, so any level count round-trips") {
  TempDir dir;
  write_bytes(dir / "c.conf", "code_dim = 20\nlevels = [16]\ngroup_size = 4\n");
  write_feature_file(dir / "f.jdf", random_features(5, 20, 30));
  const std::string conf = dir / "c.conf";
  REQUIRE(run({"tokenize", "--config", conf, "--in", dir / "f.jdf", "--out", dir / "a.jdt"}).code == 0);
  REQUIRE(run({"detokenize", "--in", dir / "a.jdt", "--out", dir / "q.jdf"}).code == 0);
  REQUIRE(run({"tokenize", "--config", conf, "--projected", "--in", dir / "q.jdf", "--out",
               dir / "b.jdt"}).code == 0);
  CHECK(read_bytes(dir / "a.jdt") == read_bytes(dir / "b.jdt"));
}

TEST_CASE("detokenize: zero tokens and tampered tokens") {
  TempDir dir;
  const auto scheme = build_scheme(FsqLevels::uniform(), 7);
  write_token_file(dir / "z.jdt", TokenStream{TokenMatrix::Zero(4, 19), scheme, 2.5});
  REQUIRE(run({"detokenize", "--in", dir / "z.jdt", "--out", dir / "z.jdf"}).code == kExitOk);
  const auto z = read_feature_file(dir / "z.jdf");
  CHECK(z.data.rows() == 128);
  CHECK((z.data.array() == -0.75f).all());

  std::string bytes = read_bytes(dir / "z.jdt");
  const std::size_t payload = bytes.size() - 4 * 19 * 2;
  const std::size_t at = payload + (2 * 19 + 5) * 2;  // frame 2, group 5
  bytes[at] = '\x00';
  bytes[at + 1] = '\x40';  // 16384
  write_bytes(dir / "bad.jdt", bytes);
  const auto r = run({"detokenize", "--in", dir / "bad.jdt", "--out", dir / "bad.jdf"});
  CHECK(r.code == kExitValidation);
  CHECK(contains(r.err, "frame 2"));
  CHECK(contains(r.err, "group 5"));
  CHECK_FALSE(fs::exists(dir / "bad.jdf"));
}

TEST_CASE("info reports rates and vocabularies") {
  auto r = run({"info"});
  REQUIRE(r.code == kExitOk);
  CHECK(contains(r.out, "frame rate: 2.5 Hz"));
  CHECK(contains(r.out, "groups: 19"));
  CHECK(contains(r.out, "pad dimensions: 5"));
  CHECK(contains(r.out, "token rate: 47.5 tokens/sec"));
  CHECK(contains(r.out, "vocabulary: 16384\n"));
  CHECK(contains(r.out, "bits/sec (nominal): 665\n"));
  CHECK(contains(r.out, "bits/sec (exact): 640\n"));
  CHECK(contains(r.out, "no-packing baseline: 320 tokens/sec"));

  TempDir dir;
  write_bytes(dir / "g1.conf", "group_size = 1\n");
  r = run({"info", "--config", dir / "g1.conf"});
  REQUIRE(r.code == kExitOk);
  CHECK(contains(r.out, "token rate: 320 tokens/sec"));

  write_bytes(dir / "encodec.conf", "sample_rate = 24000\nhop = 320\n");
  r = run({"info", "--config", dir / "encodec.conf"});
  CHECK(contains(r.out, "frame rate: 75 Hz"));

  write_bytes(dir / "shipped.conf", read_bytes(JEPATOK_DEFAULT_CONFIG));
  CHECK(run({"info", "--config", dir / "shipped.conf"}).out == run({"info"}).out);

  write_bytes(dir / "wide.conf", "group_size = 40\n");
  CHECK(run({"info", "--config", dir / "wide.conf"}).code == kExitBadConfig);
}

TEST_CASE("score") {
  TempDir dir;
  write_feature_file(dir / "ref.jdf", waveform(6, 24000));
  write_feature_file(dir / "hyp.jdf", waveform(6, 24000, 2.0f));
  write_feature_file(dir / "short.jdf", waveform(6, 20000));

  auto r = run({"score", "--ref", dir / "ref.jdf", "--hyp", dir / "ref.jdf"});
  REQUIRE(r.code == kExitOk);
  CHECK(contains(r.out, "l1: 0\n"));
  CHECK(contains(r.out, "stft total: 0\n"));
  CHECK(contains(r.out, "rec + lambda_stft * stft: 0\n"));

  r = run({"score", "--ref", dir / "ref.jdf", "--hyp", dir / "hyp.jdf"});
  REQUIRE(r.code == kExitOk);
  const auto pos = r.out.find("stft total: ");
  REQUIRE(pos != std::string::npos);
  const double total = std::stod(r.out.substr(pos + 12));
  CHECK(std::abs(total - 5.0 * (1.0 + std::log(2.0))) / total < 1e-3);

  r = run({"score", "--ref", dir / "ref.jdf", "--hyp", dir / "short.jdf"});
  CHECK(r.code == kExitValidation);

  FeatureFile other_rate = waveform(6, 24000);
  other_rate.frame_rate_hz = 16000;
  write_feature_file(dir / "rate.jdf", other_rate);
  CHECK(run({"score", "--ref", dir / "ref.jdf", "--hyp", dir / "rate.jdf"}).code == kExitValidation);
}

TEST_CASE("mask subcommand") {
  TempDir dir;
  auto r = run({"mask", "--frames", "1000", "--batch", "3", "--seed", "5", "--out", dir / "m.bin"});
  REQUIRE(r.code == kExitOk);
  const std::string bytes = read_bytes(dir / "m.bin");
  REQUIRE(bytes.size() == 3000);
  for (int b = 0; b < 3; ++b) {
    int zeros = 0;
    for (int t = 0; t < 1000; ++t) {
      const char c = bytes[static_cast<std::size_t>(b * 1000 + t)];
      CHECK((c == 0 || c == 1));
      zeros += c == 0;
    }
    CHECK(zeros >= 500);
    CHECK(zeros <= 501);
  }

  r = run({"mask", "--frames", "1000", "--seed", "5", "--compat-paper-mask-counter", "--out",
           dir / "p.bin"});
  CHECK(r.code == kExitOk);
  r = run({"mask", "--frames", "1000", "--seed", "5", "--counting", "paper", "--out", dir / "p2.bin"});
  CHECK(read_bytes(dir / "p.bin") == read_bytes(dir / "p2.bin"));

  write_bytes(dir / "m.conf", "mask.ratio = 0.25\nmask.span_min = 2\nmask.span_max = 2\n");
  r = run({"mask", "--config", dir / "m.conf", "--frames", "8", "--out", dir / "s.bin"});
  REQUIRE(r.code == kExitOk);
  const std::string s = read_bytes(dir / "s.bin");
  CHECK(std::count(s.begin(), s.end(), '\0') == 2);

  CHECK(run({"mask", "--frames", "0", "--out", dir / "x.bin"}).code == kExitBadConfig);
  CHECK(run({"mask", "--frames", "10", "--counting", "bogus", "--out", dir / "x.bin"}).code ==
        kExitUsage);
}

TEST_CASE("usage") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

}  // TEST_SUITE
