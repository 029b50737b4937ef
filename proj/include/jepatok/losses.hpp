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

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "jepatok/error.hpp"
#include "jepatok/types.hpp"

namespace jepatok {

// ---------------------------------------------------------------------------
// Stage 1: masked prediction
// ---------------------------------------------------------------------------

/// Mean squared error over masked frames only, normalized by
/// (masked frames x channels). `target` is a constant: nothing here ever
/// reports sensitivity to it.
template <typename Scalar>
Scalar jepa_masked_mse(const Features<Scalar>& pred, const Features<Scalar>& target,
                       const BinaryMask& mask) {
  require(pred.rows() == target.rows() && pred.cols() == target.cols(),
          ErrorCode::kInvalidArgument, "jepa_masked_mse: pred/target shape mismatch");
  require(mask.size() == pred.cols(), ErrorCode::kInvalidArgument,
          "jepa_masked_mse: mask length " + std::to_string(mask.size()) +
              " does not match " + std::to_string(pred.cols()) + " frames");
  Scalar sum = 0;
  Eigen::Index n_mask = 0;
  for (Eigen::Index t = 0; t < pred.cols(); ++t) {
    if (mask[t] != 0) continue;
    sum += (pred.col(t) - target.col(t)).squaredNorm();
    ++n_mask;
  }
  require(n_mask > 0, ErrorCode::kInvalidArgument, "jepa_masked_mse: empty mask set");
  return sum / (Scalar(n_mask) * Scalar(pred.rows()));
}

/// Batched form: masked positions are pooled over every row of the batch.
template <typename Scalar>
Scalar jepa_masked_mse(const std::vector<Features<Scalar>>& pred,
                       const std::vector<Features<Scalar>>& target,
                       const BatchMask& masks) {
  require(pred.size() == target.size() &&
              static_cast<Eigen::Index>(pred.size()) == masks.rows(),
          ErrorCode::kInvalidArgument, "jepa_masked_mse: batch size mismatch");
  Scalar sum = 0;
  Eigen::Index n_mask = 0;
  for (std::size_t b = 0; b < pred.size(); ++b) {
    const BinaryMask row = masks.row(static_cast<Eigen::Index>(b)).transpose();
    const Eigen::Index masked = (row.array() == 0).count();
    if (masked == 0) continue;
    sum += jepa_masked_mse(pred[b], target[b], row) * Scalar(masked);
    n_mask += masked;
  }
  require(n_mask > 0, ErrorCode::kInvalidArgument, "jepa_masked_mse: empty mask set");
  return sum / Scalar(n_mask);
}

/// d loss / d pred; zero at visible frames.
template <typename Scalar>
Features<Scalar> jepa_masked_mse_grad(const Features<Scalar>& pred,
                                      const Features<Scalar>& target,
                                      const BinaryMask& mask) {
  require(pred.rows() == target.rows() && pred.cols() == target.cols() &&
              mask.size() == pred.cols(),
          ErrorCode::kInvalidArgument, "jepa_masked_mse_grad: shape mismatch");
  const Eigen::Index n_mask = (mask.array() == 0).count();
  require(n_mask > 0, ErrorCode::kInvalidArgument, "jepa_masked_mse_grad: empty mask set");
  const Scalar scale = Scalar(2) / (Scalar(n_mask) * Scalar(pred.rows()));
  Features<Scalar> grad = Features<Scalar>::Zero(pred.rows(), pred.cols());
  for (Eigen::Index t = 0; t < pred.cols(); ++t)
    if (mask[t] == 0) grad.col(t) = scale * (pred.col(t) - target.col(t));
  return grad;
}

// ---------------------------------------------------------------------------
// Stage 2: reconstruction
// ---------------------------------------------------------------------------

template <typename Scalar>
Scalar l1_loss(const Signal<Scalar>& x_hat, const Signal<Scalar>& x) {
  require(x_hat.size() == x.size(), ErrorCode::kInvalidArgument,
          "l1_loss: length " + std::to_string(x_hat.size()) + " vs " +
              std::to_string(x.size()));
  require(x.size() >= 1, ErrorCode::kInvalidArgument, "l1_loss: empty signal");
  return (x_hat - x).array().abs().mean();
}

enum class Window { kHann, kRectangular };

enum class Framing {
  kCenterReflect,  // fft/2 reflect padding on both sides, 1 + len/hop frames
  kCircular,       // wrap-around padding, len/hop frames (len % hop == 0)
};

/// Periodic window of length n.
template <typename Scalar>
Signal<Scalar> make_window(Window window, Eigen::Index n) {
  if (window == Window::kRectangular) return Signal<Scalar>::Ones(n);
  Signal<Scalar> w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = Scalar(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(n)));
  return w;
}

/// |STFT| as [fft/2 + 1 bins x frames].
template <typename Scalar>
Features<Scalar> stft_magnitude(const Signal<Scalar>& x, Eigen::Index fft_size,
                                Eigen::Index hop, Window window = Window::kHann,
                                Framing framing = Framing::kCenterReflect) {
  require(fft_size >= 2 && fft_size % 2 == 0, ErrorCode::kInvalidArgument,
          "stft: fft size must be even and >= 2");
  require(hop >= 1 && hop <= fft_size, ErrorCode::kInvalidArgument,
          "stft: hop must lie in [1, fft size]");
  require(x.size() >= fft_size, ErrorCode::kInvalidArgument,
          "stft: signal of " + std::to_string(x.size()) +
              " samples is shorter than fft size " + std::to_string(fft_size));

  const Eigen::Index len = x.size();
  const Eigen::Index pad = fft_size / 2;
  Eigen::Index frames = 0;
  if (framing == Framing::kCenterReflect) {
    frames = 1 + len / hop;
  } else {
    require(len % hop == 0, ErrorCode::kInvalidArgument,
            "stft: circular framing needs length divisible by hop");
    frames = len / hop;
  }
  // Sample n of the padded signal, n in [0, len + 2*pad).
  auto padded = [&](Eigen::Index n) -> Scalar {
    Eigen::Index i = n - pad;
    if (framing == Framing::kCircular) return x[((i % len) + len) % len];
    if (i < 0) i = -i;
    if (i >= len) i = 2 * (len - 1) - i;
    return x[i];
  };

  const Signal<Scalar> w = make_window<Scalar>(window, fft_size);
  const Eigen::Index bins = fft_size / 2 + 1;
  Features<Scalar> mag(bins, frames);
  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
  std::vector<Scalar> frame(static_cast<std::size_t>(fft_size));
  std::vector<std::complex<Scalar>> spectrum;
  for (Eigen::Index f = 0; f < frames; ++f) {
    for (Eigen::Index j = 0; j < fft_size; ++j)
      frame[static_cast<std::size_t>(j)] = padded(f * hop + j) * w[j];
    fft.fwd(spectrum, frame);
    for (Eigen::Index k = 0; k < bins; ++k)
      mag(k, f) = std::abs(spectrum[static_cast<std::size_t>(k)]);
  }
  return mag;
}

/// ||S_hat - S_ref||_F / ||S_ref||_F.
template <typename Scalar>
Scalar spectral_convergence(const Features<Scalar>& s_ref, const Features<Scalar>& s_hat) {
  require(s_ref.rows() == s_hat.rows() && s_ref.cols() == s_hat.cols(),
          ErrorCode::kInvalidArgument, "spectral_convergence: shape mismatch");
  const Scalar ref_norm = s_ref.norm();
  require(ref_norm > 0, ErrorCode::kInvalidArgument,
          "spectral_convergence: reference magnitudes are all zero");
  return (s_hat - s_ref).norm() / ref_norm;
}

/// Mean |ln S_hat - ln S_ref| over all elements, magnitudes floored first.
template <typename Scalar>
Scalar log_magnitude_l1(const Features<Scalar>& s_ref, const Features<Scalar>& s_hat,
                        Scalar floor = Scalar(1e-7)) {
  require(s_ref.rows() == s_hat.rows() && s_ref.cols() == s_hat.cols(),
          ErrorCode::kInvalidArgument, "log_magnitude_l1: shape mismatch");
  require(s_ref.size() > 0, ErrorCode::kInvalidArgument, "log_magnitude_l1: empty input");
  return (s_hat.array().max(floor).log() - s_ref.array().max(floor).log()).abs().mean();
}

struct StftConfig {
  std::vector<Eigen::Index> fft_sizes{2048, 1024, 512, 256, 128};
  std::vector<Eigen::Index> hop_sizes{512, 256, 128, 64, 32};
  Window window = Window::kHann;
  double magnitude_floor = 1e-7;

  void validate() const {
    require(!fft_sizes.empty() && fft_sizes.size() == hop_sizes.size(),
            ErrorCode::kConfig, "stft config: fft and hop lists must be non-empty and equal length");
    for (std::size_t m = 0; m < fft_sizes.size(); ++m)
      require(hop_sizes[m] >= 1 && hop_sizes[m] <= fft_sizes[m], ErrorCode::kConfig,
              "stft config: resolution " + std::to_string(m) + " needs 1 <= hop <= fft");
  }
};

template <typename Scalar>
struct StftLoss {
  struct Term {
    Scalar spectral_convergence;
    Scalar log_magnitude;
  };
  Scalar total = 0;
  std::vector<Term> per_resolution;
};

/// Sum over resolutions of spectral convergence + log-magnitude L1.
template <typename Scalar>
StftLoss<Scalar> multi_res_stft(const Signal<Scalar>& x_hat, const Signal<Scalar>& x,
                                const StftConfig& cfg = {}) {
  cfg.validate();
  require(x_hat.size() == x.size(), ErrorCode::kInvalidArgument,
          "multi_res_stft: length " + std::to_string(x_hat.size()) + " vs " +
              std::to_string(x.size()));
  StftLoss<Scalar> out;
  for (std::size_t m = 0; m < cfg.fft_sizes.size(); ++m) {
    const auto s_ref = stft_magnitude(x, cfg.fft_sizes[m], cfg.hop_sizes[m], cfg.window);
    const auto s_hat = stft_magnitude(x_hat, cfg.fft_sizes[m], cfg.hop_sizes[m], cfg.window);
    typename StftLoss<Scalar>::Term term{
        spectral_convergence(s_ref, s_hat),
        log_magnitude_l1(s_ref, s_hat, Scalar(cfg.magnitude_floor))};
    out.total += term.spectral_convergence + term.log_magnitude;
    out.per_resolution.push_back(term);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adversarial terms, as reductions over supplied discriminator outputs
// ---------------------------------------------------------------------------

/// Outputs of every discriminator for one pass (real or generated audio).
/// Tensors are flattened; only element counts matter.
template <typename Scalar>
struct DiscriminatorOutputs {
  std::vector<Signal<Scalar>> scores;                 // one per discriminator
  std::vector<std::vector<Signal<Scalar>>> features;  // [discriminator][layer]
};

template <typename Scalar>
struct GanLosses {
  Scalar gen;   // sum_d mean((D_d(x_hat) - 1)^2)
  Scalar feat;  // sum_d sum_l mean|D_d^l(x) - D_d^l(x_hat)|
  Scalar disc;  // sum_d mean((D_d(x) - 1)^2) + mean(D_d(x_hat)^2)

  Scalar generator_total() const { return gen + feat; }
};

template <typename Scalar>
GanLosses<Scalar> gan_losses(const DiscriminatorOutputs<Scalar>& real,
                             const DiscriminatorOutputs<Scalar>& fake) {
  require(real.scores.size() == fake.scores.size() &&
              real.features.size() == fake.features.size(),
          ErrorCode::kInvalidArgument, "gan_losses: discriminator count mismatch");
  GanLosses<Scalar> out{0, 0, 0};
  for (std::size_t d = 0; d < real.scores.size(); ++d) {
    const auto& r = real.scores[d];
    const auto& f = fake.scores[d];
    require(r.size() > 0 && r.size() == f.size(), ErrorCode::kInvalidArgument,
            "gan_losses: score shape mismatch for discriminator " + std::to_string(d));
    out.gen += (f.array() - Scalar(1)).square().mean();
    out.disc += (r.array() - Scalar(1)).square().mean() + f.array().square().mean();
  }
  for (std::size_t d = 0; d < real.features.size(); ++d) {
    require(real.features[d].size() == fake.features[d].size(), ErrorCode::kInvalidArgument,
            "gan_losses: layer count mismatch for discriminator " + std::to_string(d));
    for (std::size_t l = 0; l < real.features[d].size(); ++l) {
      const auto& r = real.features[d][l];
      const auto& f = fake.features[d][l];
      require(r.size() > 0 && r.size() == f.size(), ErrorCode::kInvalidArgument,
              "gan_losses: feature shape mismatch at discriminator " + std::to_string(d) +
                  ", layer " + std::to_string(l));
      out.feat += (r - f).array().abs().mean();
    }
  }
  return out;
}

struct LossWeights {
  double stft = 2.0;
  double gan = 0.1;
};

/// L_rec + lambda_stft * L_stft + lambda_gan * L_gan.
template <typename Scalar>
Scalar total_stage2(Scalar rec, Scalar stft, Scalar gan, const LossWeights& w = {}) {
  return rec + Scalar(w.stft) * stft + Scalar(w.gan) * gan;
}

}  // namespace jepatok
