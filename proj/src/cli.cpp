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

#include "jepatok/cli.hpp"

#include <cmath>
#include <iomanip>
#include <optional>

#include <CLI11.hpp>

#include "jepatok/config.hpp"
#include "jepatok/fsq.hpp"
#include "jepatok/io.hpp"
#include "jepatok/losses.hpp"
#include "jepatok/masking.hpp"
#include "jepatok/radix.hpp"

namespace jepatok {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return kExitBadConfig;
    case ErrorCode::kMalformedInput: return kExitMalformedInput;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kOutOfRange: return kExitValidation;
    case ErrorCode::kIo: return kExitIo;
  }
  return kExitValidation;
}

namespace {

CodecConfig config_or_default(const std::string& path) {
  return path.empty() ? CodecConfig{} : load_config(path);
}

FsqLevels levels_of(const RadixScheme& scheme) {
  return FsqLevels{std::vector<std::int32_t>(scheme.radices().begin(), scheme.radices().end())};
}

// Group vocabularies as runs, e.g. "16384 x 18, 16 x 1".
std::string vocabulary_runs(const RadixScheme& scheme) {
  std::string out;
  std::size_t g = 0;
  while (g < scheme.group_count()) {
    std::size_t end = g;
    while (end < scheme.group_count() &&
           scheme.group_vocabulary(end) == scheme.group_vocabulary(g))
      ++end;
    if (!out.empty()) out += ", ";
    out += to_string(scheme.group_vocabulary(g)) + " x " + std::to_string(end - g);
    g = end;
  }
  return out;
}

int cmd_tokenize(const std::string& config_path, const std::string& in_path,
                 const std::string& out_path, bool projected, std::ostream& out) {
  const CodecConfig cfg = config_or_default(config_path);
  const RadixScheme scheme = build_scheme(cfg.levels, cfg.group_size);
  const FeatureFile features = read_feature_file(in_path);
  require(features.data.rows() == cfg.levels.dims(), ErrorCode::kInvalidArgument,
          "feature file has " + std::to_string(features.data.rows()) +
              " channels, config expects " + std::to_string(cfg.levels.dims()));

  const FeaturesD z = features.data.cast<double>();
  const auto quantized = projected ? fsq_quantize_projected(z, cfg.levels)
                                   : fsq_quantize(z, cfg.levels);
  double frame_rate = features.frame_rate_hz;
  if (frame_rate <= 0) frame_rate = cfg.sample_rate / static_cast<double>(cfg.hop);
  const TokenStream stream{pack_frames(quantized.indices, scheme), scheme, frame_rate};
  write_token_file(out_path, stream);

  out << "frames: " << stream.tokens.rows() << "\n"
      << "frame rate: " << frame_rate << " Hz\n"
      << "groups per frame: " << scheme.group_count() << "\n"
      << "token rate: " << stream.tokens_per_second() << " tokens/sec\n"
      << "group vocabularies: " << vocabulary_runs(scheme) << "\n";
  return kExitOk;
}

int cmd_detokenize(const std::string& in_path, const std::string& out_path,
                   std::ostream& out) {
  const TokenStream stream = read_token_file(in_path);
  const IndexMatrix indices = unpack_frames(stream.tokens, stream.scheme);
  const FeaturesD values = fsq_dequantize<double>(indices, levels_of(stream.scheme));
  write_feature_file(out_path, FeatureFile{values.cast<float>(), stream.frame_rate_hz});
  out << "frames: " << stream.tokens.rows() << "\n"
      << "channels: " << values.rows() << "\n";
  return kExitOk;
}

int cmd_info(const std::string& config_path, std::ostream& out) {
  const CodecConfig cfg = config_or_default(config_path);
  const RadixScheme scheme = build_scheme(cfg.levels, cfg.group_size);
  const TokenRate rate = token_rate(cfg.sample_rate, cfg.hop, scheme.group_count());

  WideUint full_vocab = 0;
  for (std::size_t g = 0; g < scheme.group_count(); ++g)
    if (scheme.group_pads(g) == 0) full_vocab = std::max(full_vocab, scheme.group_vocabulary(g));
  if (full_vocab == 0) full_vocab = scheme.group_vocabulary(0);

  double exact_bits = 0;
  for (std::size_t g = 0; g < scheme.group_count(); ++g)
    exact_bits += std::log2(static_cast<double>(scheme.group_vocabulary(g)));

  out << "sample rate: " << cfg.sample_rate << " Hz\n"
      << "hop: " << cfg.hop << " samples\n"
      << "frame rate: " << rate.frame_rate_hz << " Hz\n"
      << "dimensions: " << scheme.dims() << "\n"
      << "group size: " << scheme.group_size() << "\n"
      << "groups: " << scheme.group_count() << "\n"
      << "pad dimensions: " << scheme.pad_count() << "\n"
      << "token rate: " << rate.tokens_per_second << " tokens/sec\n"
      << "vocabulary: " << to_string(full_vocab) << "\n"
      << "group vocabularies: " << vocabulary_runs(scheme) << "\n"
      << "token width: " << scheme.token_width_bits() << " bits\n"
      << "bits/sec (nominal): "
      << rate.tokens_per_second * std::log2(static_cast<double>(full_vocab)) << "\n"
      << "bits/sec (exact): " << rate.frame_rate_hz * exact_bits << "\n"
      << "no-packing baseline: "
      << rate.frame_rate_hz * static_cast<double>(scheme.dims()) << " tokens/sec\n";
  return kExitOk;
}

int cmd_score(const std::string& config_path, const std::string& ref_path,
              const std::string& hyp_path, std::ostream& out) {
  const CodecConfig cfg = config_or_default(config_path);
  const FeatureFile ref = read_feature_file(ref_path);
  const FeatureFile hyp = read_feature_file(hyp_path);
  require(ref.data.rows() == 1 && hyp.data.rows() == 1, ErrorCode::kInvalidArgument,
          "score: waveform files must be mono (1 channel)");
  require(ref.data.cols() == hyp.data.cols(), ErrorCode::kInvalidArgument,
          "score: length mismatch (" + std::to_string(ref.data.cols()) + " vs " +
              std::to_string(hyp.data.cols()) + " samples)");
  require(ref.frame_rate_hz == hyp.frame_rate_hz, ErrorCode::kInvalidArgument,
          "score: sample rate mismatch");

  const SignalD x = ref.data.row(0).transpose().cast<double>();
  const SignalD x_hat = hyp.data.row(0).transpose().cast<double>();
  const StftConfig stft_cfg;
  const double rec = l1_loss(x_hat, x);
  const auto stft = multi_res_stft(x_hat, x, stft_cfg);

  out << "samples: " << x.size() << "\n"
      << "sample rate: " << ref.frame_rate_hz << " Hz\n"
      << "l1: " << rec << "\n";
  for (std::size_t m = 0; m < stft.per_resolution.size(); ++m) {
    out << "stft fft=" << stft_cfg.fft_sizes[m] << " hop=" << stft_cfg.hop_sizes[m]
        << ": sc=" << stft.per_resolution[m].spectral_convergence
        << " mag=" << stft.per_resolution[m].log_magnitude << "\n";
  }
  out << "stft total: " << stft.total << "\n"
      << "lambda_stft: " << cfg.weights.stft << "\n"
      << "rec + lambda_stft * stft: " << rec + cfg.weights.stft * stft.total << "\n";
  return kExitOk;
}

int cmd_mask(const std::string& config_path, std::int64_t frames, std::int64_t batch,
             std::optional<std::uint64_t> seed, const std::string& counting,
             bool paper_counter, const std::string& out_path, std::ostream& out) {
  CodecConfig cfg = config_or_default(config_path);
  if (seed) cfg.mask.seed = *seed;
  if (paper_counter || counting == "paper")
    cfg.mask.counting = SpanCounting::kPaperCounter;
  else if (counting == "new")
    cfg.mask.counting = SpanCounting::kNewPositions;
  else
    cfg.mask.counting = SpanCounting::kClipToBudget;

  const BatchMask masks = generate_block_masks(batch, frames, cfg.mask);
  std::string bytes(static_cast<std::size_t>(masks.size()), '\0');
  for (Eigen::Index i = 0; i < masks.size(); ++i)
    bytes[static_cast<std::size_t>(i)] = static_cast<char>(masks.data()[i]);
  write_bytes(out_path, bytes);

  const auto masked = (masks.array() == 0).count();
  out << "batch: " << batch << "\n"
      << "frames: " << frames << "\n"
      << "masked fraction: "
      << static_cast<double>(masked) / static_cast<double>(masks.size()) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"jepatok: FSQ speech tokens, mixed-radix packing and codec losses"};
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, ref_path, hyp_path, counting = "clip";
  bool projected = false, paper_counter = false;
  std::int64_t frames = 0, batch = 1;
  std::optional<std::uint64_t> seed;

  auto* tokenize = app.add_subcommand("tokenize", "Quantize and pack a feature file");
  tokenize->add_option("--config", config_path, "Config file");
  tokenize->add_option("--in", in_path, "Input feature file (JDF1)")->required();
  tokenize->add_option("--out", out_path, "Output token file (JDT1)")->required();
  tokenize->add_flag("--projected", projected,
                     "Input is already tanh-projected; skip the projection");

  auto* detokenize = app.add_subcommand("detokenize", "Unpack tokens to quantized features");
  detokenize->add_option("--in", in_path, "Input token file (JDT1)")->required();
  detokenize->add_option("--out", out_path, "Output feature file (JDF1)")->required();

  auto* info = app.add_subcommand("info", "Report rates and vocabularies for a config");
  info->add_option("--config", config_path, "Config file");

  auto* score = app.add_subcommand("score", "Score a waveform against a reference");
  score->add_option("--config", config_path, "Config file");
  score->add_option("--ref,--in", ref_path, "Reference waveform (JDF1, 1 channel)")->required();
  score->add_option("--hyp", hyp_path, "Hypothesis waveform (JDF1, 1 channel)")->required();

  auto* mask = app.add_subcommand("mask", "Emit block masks as 0/1 bytes, row-major [B x T]");
  mask->add_option("--config", config_path, "Config file (mask.* keys)");
  mask->add_option("--frames", frames, "Sequence length T")->required();
  mask->add_option("--batch", batch, "Batch size B");
  mask->add_option("--seed", seed, "Seed (overrides mask.seed)");
  mask->add_option("--counting", counting, "Span counting: clip, new or paper")
      ->check(CLI::IsMember({"clip", "new", "paper"}));
  mask->add_flag("--compat-paper-mask-counter", paper_counter,
                 "Same as --counting paper: count overlapping spans in full");
  mask->add_option("--out", out_path, "Output mask file")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  out << std::setprecision(12);
  try {
    if (*tokenize) return cmd_tokenize(config_path, in_path, out_path, projected, out);
    if (*detokenize) return cmd_detokenize(in_path, out_path, out);
    if (*info) return cmd_info(config_path, out);
    if (*score) return cmd_score(config_path, ref_path, hyp_path, out);
    if (*mask)
      return cmd_mask(config_path, frames, batch, seed, counting, paper_counter, out_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace jepatok
