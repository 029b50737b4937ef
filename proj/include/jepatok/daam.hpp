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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "jepatok/error.hpp"
#include "jepatok/types.hpp"

namespace jepatok {

/// Learnable state of one density-adaptive gate: K Gaussian components with
/// mean offsets `delta` and log-scales `nu`, plus the residual gate strength.
template <typename Scalar>
struct DaamParams {
  Signal<Scalar> delta;
  Signal<Scalar> nu;
  Scalar eps = Scalar(1e-3);
  Scalar var_floor = Scalar(1e-6);
  Scalar alpha = Scalar(0.05);

  /// delta = 0, nu = ln 0.5, alpha = 0.05.
  static DaamParams defaults(Eigen::Index components = 4) {
    DaamParams p;
    p.delta = Signal<Scalar>::Zero(components);
    p.nu = Signal<Scalar>::Constant(components, Scalar(std::log(0.5)));
    return p;
  }

  Eigen::Index components() const { return delta.size(); }

  template <typename Other>
  DaamParams<Other> cast() const {
    DaamParams<Other> out;
    out.delta = delta.template cast<Other>();
    out.nu = nu.template cast<Other>();
    out.eps = Other(eps);
    out.var_floor = Other(var_floor);
    out.alpha = Other(alpha);
    return out;
  }

  void validate() const {
    require(delta.size() >= 1, ErrorCode::kConfig,
            "daam: need at least one component");
    require(delta.size() == nu.size(), ErrorCode::kConfig,
            "daam: delta has " + std::to_string(delta.size()) +
                " entries but nu has " + std::to_string(nu.size()));
    require(eps > 0 && var_floor > 0, ErrorCode::kConfig,
            "daam: eps and var_floor must be positive");
    require(delta.allFinite() && nu.allFinite() && std::isfinite(alpha),
            ErrorCode::kConfig, "daam: parameters must be finite");
  }
};

template <typename Scalar>
struct TemporalStats {
  Scalar mean;
  Scalar var;       // after the floor
  bool floored;     // true when the raw variance was below var_floor
};

namespace detail {

template <typename Scalar>
Scalar softplus(Scalar v) {
  // log1p(exp(v)) without overflow for large v
  return v > Scalar(0) ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

template <typename Scalar>
Scalar sigmoid(Scalar v) {
  return Scalar(1) / (Scalar(1) + std::exp(-v));
}

template <typename Derived>
void check_signal(const Eigen::MatrixBase<Derived>& x, const char* op) {
  require(x.size() >= 1, ErrorCode::kInvalidArgument,
          std::string(op) + ": empty input");
  require(x.allFinite(), ErrorCode::kInvalidArgument,
          std::string(op) + ": non-finite input");
}

}  // namespace detail

/// Derived component scales softplus(nu) + eps.
template <typename Scalar>
Signal<Scalar> daam_scales(const DaamParams<Scalar>& params) {
  return params.nu.unaryExpr([&](Scalar v) { return detail::softplus(v) + params.eps; });
}

/// Population mean and floored variance over time.
template <typename Derived>
TemporalStats<typename Derived::Scalar> temporal_stats(
    const Eigen::MatrixBase<Derived>& x,
    typename Derived::Scalar var_floor = typename Derived::Scalar(1e-6)) {
  using Scalar = typename Derived::Scalar;
  detail::check_signal(x, "temporal_stats");
  const Scalar mean = x.mean();
  const Scalar raw = (x.array() - mean).square().mean();
  return {mean, std::max(raw, var_floor), raw < var_floor};
}

/// Log of the gate, per timestep. Finite even where the gate underflows.
template <typename Derived>
Signal<typename Derived::Scalar> daam_log_gate(
    const Eigen::MatrixBase<Derived>& x,
    const DaamParams<typename Derived::Scalar>& params) {
  using Scalar = typename Derived::Scalar;
  detail::check_signal(x, "daam_gate");
  params.validate();

  const auto stats = temporal_stats(x, params.var_floor);
  const Scalar sigma = std::sqrt(stats.var);
  const Signal<Scalar> scales = daam_scales(params);
  const Eigen::Index k_count = params.components();
  const Scalar half_log_2pi = Scalar(0.5 * std::log(2.0 * std::numbers::pi));
  const Scalar log_k = std::log(Scalar(k_count));

  // [K x T] component log-densities
  Features<Scalar> log_p(k_count, x.size());
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Scalar denom = sigma * scales[k] + params.eps;
    const Scalar center = stats.mean + params.delta[k];
    const Scalar norm = std::log(scales[k]) + half_log_2pi;
    log_p.row(k) = (-(Scalar(0.5)) *
                        ((x.transpose().array() - center) / denom).square() -
                    norm).matrix();
  }

  Signal<Scalar> out(x.size());
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    const Scalar peak = log_p.col(t).maxCoeff();
    out[t] = peak + std::log((log_p.col(t).array() - peak).exp().sum()) - log_k;
  }
  return out;
}

/// Gaussian-mixture density gate G(x_t) for a 1-channel temporal signal.
template <typename Derived>
Signal<typename Derived::Scalar> daam_gate(
    const Eigen::MatrixBase<Derived>& x,
    const DaamParams<typename Derived::Scalar>& params) {
  return daam_log_gate(x, params).array().exp().matrix();
}

/// Gate for each row of a [B x T] batch; rows never share statistics.
template <typename Scalar>
Features<Scalar> daam_gate_batch(const Features<Scalar>& rows,
                                 const DaamParams<Scalar>& params) {
  Features<Scalar> out(rows.rows(), rows.cols());
  for (Eigen::Index b = 0; b < rows.rows(); ++b) {
    const Signal<Scalar> row = rows.row(b).transpose();
    out.row(b) = daam_gate(row, params).transpose();
  }
  return out;
}

/// y[c,t] = x[c,t] * (1 + alpha * gate[t]); gate computed from `attn_proj`,
/// the caller's 1-channel projection of x.
template <typename Scalar>
Features<Scalar> gattn_modulate(const Features<Scalar>& x,
                                const Signal<Scalar>& attn_proj,
                                const DaamParams<Scalar>& params) {
  require(x.cols() == attn_proj.size(), ErrorCode::kInvalidArgument,
          "gattn_modulate: features have " + std::to_string(x.cols()) +
              " frames but projection has " + std::to_string(attn_proj.size()));
  const Signal<Scalar> gate = daam_gate(attn_proj, params);
  const Eigen::Array<Scalar, 1, Eigen::Dynamic> scale =
      (Scalar(1) + params.alpha * gate.array()).transpose();
  return (x.array().rowwise() * scale).matrix();
}

/// y = x * G, with no residual path and no alpha.
template <typename Scalar>
Features<Scalar> daam_modulate(const Features<Scalar>& x,
                               const Signal<Scalar>& attn_proj,
                               const DaamParams<Scalar>& params) {
  require(x.cols() == attn_proj.size(), ErrorCode::kInvalidArgument,
          "daam_modulate: features have " + std::to_string(x.cols()) +
              " frames but projection has " + std::to_string(attn_proj.size()));
  const Signal<Scalar> gate = daam_gate(attn_proj, params);
  return (x.array().rowwise() * gate.array().transpose()).matrix();
}

template <typename Scalar>
struct DaamGradients {
  Features<Scalar> d_delta;  // [K x T], d gate[t] / d delta[k]
  Features<Scalar> d_nu;     // [K x T], d gate[t] / d nu[k]
  Features<Scalar> d_x;      // [T x T], d gate[t] / d x[s]
};

/// Analytic Jacobians of the gate. The mean and standard deviation are
/// differentiated as functions of x; when the variance floor is active the
/// standard deviation is constant.
template <typename Scalar>
DaamGradients<Scalar> daam_gate_grad(const Signal<Scalar>& x,
                                     const DaamParams<Scalar>& params) {
  detail::check_signal(x, "daam_gate_grad");
  params.validate();
  const auto stats = temporal_stats(x, params.var_floor);
  const Scalar sigma = std::sqrt(stats.var);
  const Signal<Scalar> scales = daam_scales(params);
  const Eigen::Index k_count = params.components();
  const Eigen::Index t_count = x.size();
  const Scalar inv_t = Scalar(1) / Scalar(t_count);
  const Scalar half_log_2pi = Scalar(0.5 * std::log(2.0 * std::numbers::pi));

  // d sigma / d x[s]
  Signal<Scalar> dsigma_dx = Signal<Scalar>::Zero(t_count);
  if (!stats.floored)
    dsigma_dx = ((x.array() - stats.mean) * (inv_t / sigma)).matrix();

  DaamGradients<Scalar> g{Features<Scalar>(k_count, t_count),
                          Features<Scalar>(k_count, t_count),
                          Features<Scalar>::Zero(t_count, t_count)};
  const Scalar log_k = std::log(Scalar(k_count));

  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Scalar slope = detail::sigmoid(params.nu[k]);
    const Scalar denom = sigma * scales[k] + params.eps;
    const Scalar center = stats.mean + params.delta[k];
    for (Eigen::Index t = 0; t < t_count; ++t) {
      const Scalar z = (x[t] - center) / denom;
      const Scalar log_p =
          Scalar(-0.5) * z * z - std::log(scales[k]) - half_log_2pi;
      // dG/dtheta = G * w_k * dlog p_k/dtheta, with softmax weight w_k, and
      // G * w_k = exp(log_p - log K).
      const Scalar weighted = std::exp(log_p - log_k);
      g.d_delta(k, t) = weighted * z / denom;
      g.d_nu(k, t) =
          weighted * slope * (z * z * sigma / denom - Scalar(1) / scales[k]);
      // dz/dx[s] = (1[s==t] - 1/T)/denom - z * scale * dsigma/dx[s] / denom
      const Scalar coeff = -weighted * z / denom;
      g.d_x.row(t).array() +=
          coeff * (-inv_t - z * scales[k] * dsigma_dx.transpose().array());
      g.d_x(t, t) += coeff;
    }
  }
  return g;
}

}  // namespace jepatok
