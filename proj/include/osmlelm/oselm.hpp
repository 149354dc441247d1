// Copyright 2026 The osmlelm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Online sequential training of the output weights by recursive least squares.
//
// After an initial batch solve on N0 samples,
//   M0 = (H0^T H0 + ridge I)^{-1},  beta0 = M0 H0^T Y0,
// each arriving sample h (a hidden-layer row) updates
//   M'    = M - (M h h^T M) / (1 + h^T M h)
//   beta' = beta + M' h (y^T - h^T beta)
// and a chunk Hc of c samples uses the block (Woodbury) form
//   M'    = M - M Hc^T (I_c + Hc M Hc^T)^{-1} Hc M
//   beta' = beta + M' Hc^T (Yc - Hc beta).
//
// State is single-writer: one updater at a time. Snapshots of beta may be read
// concurrently between updates.

#include <cstdint>
#include <string>
#include <utility>

#include "osmlelm/elm.hpp"
#include "osmlelm/numerics.hpp"

namespace osmlelm {

struct OselmState {
  Matrix beta;  ///< n_hidden x m output weights
  Matrix m;     ///< n_hidden x n_hidden inverse covariance
  std::uint64_t samples_seen = 0;
  double ridge_used = 0.0;

  Index n_hidden() const noexcept { return beta.rows(); }
  Index n_labels() const noexcept { return beta.cols(); }
};

namespace detail {

inline void symmetrize(Matrix& m) {
  const Index n = m.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = avg;
      m(j, i) = avg;
    }
  }
}

inline void check_state(const OselmState& state, const ElmParams& params,
                        const char* op) {
  if (state.samples_seen == 0 || state.m.rows() != params.n_hidden() ||
      state.m.cols() != params.n_hidden() ||
      state.beta.rows() != params.n_hidden()) {
    throw DimensionError(std::string(op) +
                         ": state is uninitialized or does not match the "
                         "model's hidden layer");
  }
}

}  // namespace detail

inline OselmState init_phase(const ElmParams& params, const Matrix& x0,
                             const Matrix& y0_bipolar, double ridge = 0.0) {
  if (x0.rows() < 1) throw DimensionError("init_phase: empty initial block");
  if (y0_bipolar.rows() != x0.rows()) {
    throw DimensionError("init_phase: X0 has " + std::to_string(x0.rows()) +
                         " rows but Y0 has " + std::to_string(y0_bipolar.rows()));
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw ConfigError("init_phase: ridge must be finite and non-negative");
  }
  const Matrix h0 = hidden_map(params, x0);
  const Index n_hidden = params.n_hidden();
  OselmState state;
  try {
    state.m = solve_spd(gram(h0, ridge), Matrix::Identity(n_hidden, n_hidden));
  } catch (const FactorizationError& e) {
    throw NumericError(
        "init_phase: H0^T H0 is singular with " + std::to_string(x0.rows()) +
        " initial samples and " + std::to_string(n_hidden) +
        " hidden neurons; use an initial block of at least n_hidden samples "
        "or a positive ridge [" +
        e.what() + "]");
  }
  detail::symmetrize(state.m);
  state.beta = state.m * (h0.transpose() * y0_bipolar);
  require_finite(state.beta, "init_phase");
  state.samples_seen = static_cast<std::uint64_t>(x0.rows());
  state.ridge_used = ridge;
  return state;
}

/// Rank-one recursive least-squares step for a single sample.
inline OselmState update_sample(OselmState state, const ElmParams& params,
                                const Vector& x, const Vector& y_bipolar) {
  detail::check_state(state, params, "update_sample");
  if (x.size() != params.n_features()) {
    throw DimensionError("update_sample: x has " + std::to_string(x.size()) +
                         " entries, expected " +
                         std::to_string(params.n_features()));
  }
  if (y_bipolar.size() != state.n_labels()) {
    throw DimensionError("update_sample: y has " +
                         std::to_string(y_bipolar.size()) + " entries, expected " +
                         std::to_string(state.n_labels()));
  }
  const Matrix xrow = x.transpose();
  const Vector h = hidden_map(params, xrow).row(0).transpose();
  const Vector mh = state.m * h;
  const double denom = 1.0 + h.dot(mh);
  if (!std::isfinite(denom) || denom == 0.0) {
    throw NumericError("update_sample: non-finite or zero denominator 1 + h^T M h");
  }
  state.m.noalias() -= (mh * mh.transpose()) / denom;
  detail::symmetrize(state.m);
  const Eigen::RowVectorXd innovation =
      y_bipolar.transpose() - h.transpose() * state.beta;
  const Vector gain = state.m * h;
  state.beta.noalias() += gain * innovation;
  require_finite(state.beta, "update_sample");
  ++state.samples_seen;
  return state;
}

/// Block recursive least-squares step for c >= 1 samples.
inline OselmState update_chunk(OselmState state, const ElmParams& params,
                               const Matrix& xc, const Matrix& yc_bipolar) {
  detail::check_state(state, params, "update_chunk");
  if (xc.rows() < 1) throw DimensionError("update_chunk: empty chunk");
  if (yc_bipolar.rows() != xc.rows() || yc_bipolar.cols() != state.n_labels()) {
    throw DimensionError("update_chunk: Yc is " + shape_str(yc_bipolar) +
                         ", expected " + std::to_string(xc.rows()) + "x" +
                         std::to_string(state.n_labels()));
  }
  const Matrix hc = hidden_map(params, xc);
  const Index c = hc.rows();
  const Matrix mht = state.m * hc.transpose();  // n_hidden x c
  Matrix s = hc * mht;                          // c x c
  for (Index i = 0; i < c; ++i) {
    for (Index j = 0; j < i; ++j) s(j, i) = s(i, j);
    s(i, i) += 1.0;
  }
  Matrix k;
  try {
    k = solve_spd(s, mht.transpose());  // c x n_hidden
  } catch (const FactorizationError& e) {
    throw NumericError(std::string("update_chunk: I + Hc M Hc^T is singular [") +
                       e.what() + "]");
  }
  state.m.noalias() -= mht * k;
  detail::symmetrize(state.m);
  const Matrix innovation = yc_bipolar - hc * state.beta;
  state.beta.noalias() += state.m * (hc.transpose() * innovation);
  require_finite(state.beta, "update_chunk");
  state.samples_seen += static_cast<std::uint64_t>(c);
  return state;
}

}  // namespace osmlelm
