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

#include <random>

#include "jepatok/losses.hpp"
#include "oracles.hpp"

using namespace jepatok;

namespace {

SignalD noise(std::uint64_t seed, Eigen::Index n) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 0.3);
  SignalD x(n);
  for (auto& v : x) v = normal(gen);
  return x;
}

FeaturesD random_features(std::mt19937_64& gen, Eigen::Index c, Eigen::Index t) {
  std::normal_distribution<double> normal;
  FeaturesD f(c, t);
  for (auto& v : f.reshaped()) v = normal(gen);
  return f;
}

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("masked MSE examples") {
  std::mt19937_64 gen(1);
  const FeaturesD pred = random_features(gen, 4, 10);
  BinaryMask mask = BinaryMask::Ones(10);
  mask[3] = mask[4] = 0;
  CHECK(jepa_masked_mse(pred, pred, mask) == 0.0);

  FeaturesD p1 = FeaturesD::Zero(1, 5), t1 = FeaturesD::Zero(1, 5);
  p1(0, 2) = 2.0;
  BinaryMask one = BinaryMask::Ones(5);
  one[2] = 0;
  CHECK(jepa_masked_mse(p1, t1, one) == 4.0);
}

TEST_CASE("visible frames never contribute") {
  std::mt19937_64 gen(2);
  const FeaturesD pred = random_features(gen, 8, 40);
  const FeaturesD target = random_features(gen, 8, 40);
  BinaryMask mask = BinaryMask::Ones(40);
  for (Eigen::Index t = 5; t < 25; ++t) mask[t] = 0;
  const double base = jepa_masked_mse(pred, target, mask);
  for (int trial = 0; trial < 50; ++trial) {
    FeaturesD perturbed = pred;
    for (Eigen::Index t = 0; t < 40; ++t)
      if (mask[t]) perturbed.col(t) += random_features(gen, 8, 1) * 1e3;
    CHECK(jepa_masked_mse(perturbed, target, mask) == base);
  }
}

TEST_CASE("duplicating channels leaves the loss unchanged") {
  std::mt19937_64 gen(3);
  const FeaturesD pred = random_features(gen, 3, 16);
  const FeaturesD target = random_features(gen, 3, 16);
  BinaryMask mask = BinaryMask::Ones(16);
  mask.segment(2, 6).setZero();
  FeaturesD pred2(6, 16), target2(6, 16);
  pred2 << pred, pred;
  target2 << target, target;
  CHECK(jepa_masked_mse(pred2, target2, mask) ==
        doctest::Approx(jepa_masked_mse(pred, target, mask)).epsilon(1e-14));
}

TEST_CASE("batched masked MSE pools masked frames") {
  std::mt19937_64 gen(4);
  std::vector<FeaturesD> pred{random_features(gen, 2, 6), random_features(gen, 2, 6)};
  std::vector<FeaturesD> target{random_features(gen, 2, 6), random_features(gen, 2, 6)};
  BatchMask masks = BatchMask::Ones(2, 6);
  masks(0, 1) = 0;
  masks(1, 2) = masks(1, 3) = masks(1, 4) = 0;
  double sum = 0;
  sum += (pred[0].col(1) - target[0].col(1)).squaredNorm();
  for (int t : {2, 3, 4}) sum += (pred[1].col(t) - target[1].col(t)).squaredNorm();
  CHECK(jepa_masked_mse(pred, target, masks) == doctest::Approx(sum / (4.0 * 2.0)).epsilon(1e-14));
}

TEST_CASE("masked MSE errors") {
  const FeaturesD a = FeaturesD::Zero(2, 4);
  CHECK_THROWS_AS(jepa_masked_mse(a, a, BinaryMask(BinaryMask::Ones(4))), Error);
  CHECK_THROWS_AS(jepa_masked_mse(a, FeaturesD(FeaturesD::Zero(2, 3)), BinaryMask(BinaryMask::Zero(4))), Error);
  CHECK_THROWS_AS(jepa_masked_mse(a, a, BinaryMask(BinaryMask::Zero(5))), Error);
}

TEST_CASE("masked MSE gradient matches central differences and ignores the target") {
  std::mt19937_64 gen(5);
  const FeaturesD pred = random_features(gen, 3, 8);
  const FeaturesD target = random_features(gen, 3, 8);
  BinaryMask mask = BinaryMask::Ones(8);
  mask[1] = mask[6] = 0;
  const FeaturesD grad = jepa_masked_mse_grad(pred, target, mask);
  const double h = 1e-6;
  for (Eigen::Index c = 0; c < 3; ++c)
    for (Eigen::Index t = 0; t < 8; ++t) {
      FeaturesD up = pred, down = pred;
      up(c, t) += h;
      down(c, t) -= h;
      const double fd =
          (jepa_masked_mse(up, target, mask) - jepa_masked_mse(down, target, mask)) / (2 * h);
      CHECK(oracle::close(grad(c, t), fd, 1e-6, 1e-9));
      if (mask[t]) CHECK(grad(c, t) == 0.0);
    }
}

TEST_CASE("L1 reconstruction") {
  const SignalD x = noise(6, 100);
  CHECK(l1_loss(x, x) == 0.0);
  CHECK(l1_loss(SignalD(x.array() + 0.5), x) == doctest::Approx(0.5).epsilon(1e-14));
  SignalD a(2), b = SignalD::Zero(2);
  a << 1, -1;
  CHECK(l1_loss(b, a) == 1.0);
  CHECK_THROWS_AS(l1_loss(a, SignalD(SignalD::Zero(3))), Error);
}

TEST_CASE("STFT frames match a direct DFT") {
  const SignalD x = noise(7, 700);
  const Eigen::Index n = 128, hop = 32;
  const auto mag = stft_magnitude(x, n, hop);
  CHECK(mag.rows() == n / 2 + 1);
  CHECK(mag.cols() == 1 + 700 / hop);

  const auto w = make_window<double>(Window::kHann, n);
  auto reflect = [&](Eigen::Index i) {
    if (i < 0) i = -i;
    if (i >= x.size()) i = 2 * (x.size() - 1) - i;
    return x[i];
  };
  for (Eigen::Index f : {Eigen::Index{0}, Eigen::Index{5}, mag.cols() - 1}) {
    std::vector<double> frame(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j)
      frame[static_cast<std::size_t>(j)] = reflect(f * hop + j - n / 2) * w[j];
    const auto ref = oracle::dft_magnitude(frame);
    for (Eigen::Index k = 0; k < mag.rows(); ++k)
      CHECK(oracle::close(mag(k, f), ref[static_cast<std::size_t>(k)], 1e-9, 1e-10));
  }
}

TEST_CASE("bin-centred sine concentrates in one bin") {
  const Eigen::Index n = 256, bin = 20;
  SignalD x(4096);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * double(bin) * double(i) / double(n));
  const auto mag = stft_magnitude(x, n, 64);
  // Interior frames only; the reflected edges are not periodic.
  for (Eigen::Index f = 4; f < mag.cols() - 4; ++f) {
    Eigen::Index peak;
    mag.col(f).maxCoeff(&peak);
    CHECK(peak == bin);
    for (Eigen::Index k = 0; k < mag.rows(); ++k)
      if (std::abs(k - bin) > 1) CHECK(mag(bin, f) >= 100.0 * mag(k, f));
  }
}

TEST_CASE("STFT of silence, Parseval, and short-input errors") {
  CHECK(stft_magnitude(SignalD(SignalD::Zero(512)), 256, 64).maxCoeff() == 0.0);

  const SignalD x = noise(8, 1024);
  const Eigen::Index n = 128, hop = 32;
  const auto mag = stft_magnitude(x, n, hop, Window::kRectangular);
  for (Eigen::Index f = 2; f < 30; f += 3) {
    double energy = 0;
    for (Eigen::Index j = 0; j < n; ++j) energy += x[f * hop + j - n / 2] * x[f * hop + j - n / 2];
    double spectral = mag(0, f) * mag(0, f) + mag(n / 2, f) * mag(n / 2, f);
    for (Eigen::Index k = 1; k < n / 2; ++k) spectral += 2 * mag(k, f) * mag(k, f);
    CHECK(spectral / double(n) == doctest::Approx(energy).epsilon(1e-6));
  }
  CHECK_THROWS_AS(stft_magnitude(SignalD(SignalD::Zero(100)), 128, 32), Error);
}

TEST_CASE("spectral convergence") {
  const SignalD x = noise(9, 2048);
  const auto s = stft_magnitude(x, 256, 64);
  CHECK(spectral_convergence(s, s) == 0.0);
  CHECK(spectral_convergence(s, FeaturesD(FeaturesD::Zero(s.rows(), s.cols()))) == 1.0);
  for (double a : {0.25, 0.5, 1.5, 3.0}) {
    const auto sa = stft_magnitude(SignalD(a * x), 256, 64);
    CHECK(spectral_convergence(s, sa) == doctest::Approx(std::abs(a - 1)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(spectral_convergence(FeaturesD(FeaturesD::Zero(3, 3)), s.topLeftCorner(3, 3).eval()), Error);
}

TEST_CASE("log magnitude L1") {
  std::mt19937_64 gen(10);
  FeaturesD s = random_features(gen, 5, 7).cwiseAbs().array() + 0.1;
  CHECK(log_magnitude_l1(s, s) == 0.0);
  CHECK(log_magnitude_l1(s, FeaturesD(std::exp(1.0) * s)) == doctest::Approx(1.0).epsilon(1e-14));
  const double floored = log_magnitude_l1(s, FeaturesD(FeaturesD::Zero(5, 7)));
  CHECK(std::isfinite(floored));
  CHECK(floored == doctest::Approx((s.array().log() - std::log(1e-7)).mean()).epsilon(1e-14));
  CHECK_THROWS_AS(log_magnitude_l1(s, FeaturesD(FeaturesD::Zero(5, 6))), Error);
}

TEST_CASE("multi-resolution STFT scaling identities") {
  const SignalD x = noise(11, 24000);
  const auto same = multi_res_stft(x, x);
  CHECK(same.total == 0.0);
  REQUIRE(same.per_resolution.size() == 5);

  for (double a : {0.5, 2.0}) {
    const auto r = multi_res_stft(SignalD(a * x), x);
    const double expected = 5.0 * (std::abs(a - 1) + std::abs(std::log(a)));
    CHECK(std::abs(r.total - expected) / expected < 1e-3);
    double sum = 0;
    for (const auto& term : r.per_resolution) {
      CHECK(term.spectral_convergence >= 0);
      CHECK(term.log_magnitude >= 0);
      CHECK(r.total >= term.spectral_convergence + term.log_magnitude);
      sum += term.spectral_convergence + term.log_magnitude;
    }
    CHECK(sum == doctest::Approx(r.total).epsilon(1e-14));
  }
  CHECK(multi_res_stft(SignalD(2.0 * x), x).total == doctest::Approx(8.466).epsilon(1e-3 / 8.466));
  CHECK_THROWS_AS(multi_res_stft(SignalD(SignalD::Zero(1000)), SignalD(SignalD::Zero(1000))), Error);
}

TEST_CASE("circular shifts by whole hops leave spectral losses unchanged") {
  const SignalD x = noise(12, 4096);
  const SignalD y = noise(13, 4096);
  const Eigen::Index n = 256, hop = 64;
  auto losses = [&](const SignalD& a, const SignalD& b) {
    const auto sa = stft_magnitude(a, n, hop, Window::kHann, Framing::kCircular);
    const auto sb = stft_magnitude(b, n, hop, Window::kHann, Framing::kCircular);
    return std::pair{spectral_convergence(sa, sb), log_magnitude_l1(sa, sb)};
  };
  const auto base = losses(x, y);
  for (Eigen::Index k : {1, 3, 17}) {
    SignalD xs(x.size()), ys(y.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      xs[(i + k * hop) % x.size()] = x[i];
      ys[(i + k * hop) % y.size()] = y[i];
    }
    const auto shifted = losses(xs, ys);
    CHECK(shifted.first == doctest::Approx(base.first).epsilon(1e-12));
    CHECK(shifted.second == doctest::Approx(base.second).epsilon(1e-12));
  }
}

TEST_CASE("adversarial loss reductions") {
  DiscriminatorOutputs<double> real, fake;
  real.scores = {SignalD::Ones(8), SignalD::Ones(3)};
  fake.scores = {SignalD::Zero(8), SignalD::Zero(3)};
  real.features = {{SignalD::Constant(4, 0.5), SignalD::Constant(6, -1.0)}, {SignalD::Ones(2)}};
  fake.features = real.features;
  auto l = gan_losses(real, fake);
  CHECK(l.disc == 0.0);
  CHECK(l.feat == 0.0);
  CHECK(l.gen == 2.0);

  fake.scores = {SignalD::Ones(8), SignalD::Ones(3)};
  l = gan_losses(real, fake);
  CHECK(l.gen == 0.0);
  CHECK(l.disc == 2.0);

  // Feature matching is normalized per layer by its element count.
  fake.features[0][1] = SignalD::Constant(6, 1.0);  // |diff| = 2 everywhere
  fake.features[1][0] = SignalD::Zero(2);           // |diff| = 1 everywhere
  l = gan_losses(real, fake);
  CHECK(l.feat == 3.0);
  CHECK(l.generator_total() == 3.0);

  SignalD scores(4);
  scores << 0.0, 0.5, 1.0, 2.0;
  real.scores[0] = SignalD::Ones(4);
  fake.scores = {scores, SignalD::Ones(3)};
  l = gan_losses(real, fake);
  CHECK(l.gen == doctest::Approx((1.0 + 0.25 + 0.0 + 1.0) / 4).epsilon(1e-15));

  fake.features[1].clear();
  CHECK_THROWS_AS(gan_losses(real, fake), Error);
}

TEST_CASE("stage-2 total uses the default weights") {
  CHECK(total_stage2(0.5, 1.0, 2.0) == doctest::Approx(0.5 + 2.0 * 1.0 + 0.1 * 2.0));
  CHECK(total_stage2(0.5, 1.0, 2.0, LossWeights{1.0, 0.0}) == 1.5);
}

}  // TEST_SUITE
