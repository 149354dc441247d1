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

// Single-hidden-layer feedforward network with a frozen random hidden layer.
// Only the output weights (beta) are ever trained.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "osmlelm/numerics.hpp"

namespace osmlelm {

enum class ActivationKind { kSigmoid };

constexpr std::string_view activation_name(ActivationKind a) {
  switch (a) {
    case ActivationKind::kSigmoid: return "sigmoid";
  }
  return "unknown";
}

inline std::optional<ActivationKind> parse_activation(std::string_view s) {
  if (s == "sigmoid") return ActivationKind::kSigmoid;
  return std::nullopt;
}

inline double activate(ActivationKind a, double t) {
  switch (a) {
    case ActivationKind::kSigmoid: return 1.0 / (1.0 + std::exp(-t));
  }
  return t;
}

struct WeightRange {
  double lo = -1.0;
  double hi = 1.0;
};

/// Frozen hidden layer: weights are (n_hidden x n_features), one bias per
/// hidden neuron.
class ElmParams {
 public:
  ElmParams(Matrix weights, Vector bias,
            ActivationKind activation = ActivationKind::kSigmoid)
      : weights_(std::move(weights)),
        bias_(std::move(bias)),
        activation_(activation) {
    if (weights_.rows() < 1 || weights_.cols() < 1) {
      throw DimensionError("ElmParams: need at least one feature and neuron");
    }
    if (bias_.size() != weights_.rows()) {
      throw DimensionError("ElmParams: bias length " +
                           std::to_string(bias_.size()) + " != n_hidden " +
                           std::to_string(weights_.rows()));
    }
    if (!weights_.allFinite() || !bias_.allFinite()) {
      throw NumericError("ElmParams: non-finite weights");
    }
  }

  const Matrix& weights() const noexcept { return weights_; }
  const Vector& bias() const noexcept { return bias_; }
  ActivationKind activation() const noexcept { return activation_; }
  Index n_features() const noexcept { return weights_.cols(); }
  Index n_hidden() const noexcept { return weights_.rows(); }

  friend bool operator==(const ElmParams& a, const ElmParams& b) {
    return a.activation_ == b.activation_ && a.weights_ == b.weights_ &&
           a.bias_ == b.bias_;
  }

 private:
  Matrix weights_;
  Vector bias_;
  ActivationKind activation_;
};

/// Draws W then b (row-major) from one seeded stream.
inline ElmParams init_params(Index n_features, Index n_hidden,
                             std::uint64_t seed, WeightRange range = {}) {
  if (n_features < 1 || n_hidden < 1) {
    throw ConfigError("init_params: n_features and n_hidden must be >= 1");
  }
  if (!(range.lo < range.hi)) {
    throw ConfigError("init_params: weight range requires lo < hi");
  }
  SeededRng rng(seed);
  Matrix w = rand_uniform(rng, n_hidden, n_features, range.lo, range.hi);
  Matrix b = rand_uniform(rng, n_hidden, 1, range.lo, range.hi);
  return ElmParams(std::move(w), Vector(b.col(0)), ActivationKind::kSigmoid);
}

/// H[j, i] = g(w_i . x_j + b_i).
inline Matrix hidden_map(const ElmParams& params, const Matrix& x) {
  if (x.cols() != params.n_features()) {
    throw DimensionError("hidden_map: input has " + std::to_string(x.cols()) +
                         " features, model expects " +
                         std::to_string(params.n_features()));
  }
  Matrix h = x * params.weights().transpose();
  h.rowwise() += params.bias().transpose();
  const ActivationKind act = params.activation();
  h = h.unaryExpr([act](double t) { return activate(act, t); });
  return h;
}

/// Least-squares output weights beta = H^+ Y.
inline Matrix batch_train(const ElmParams& params, const Matrix& x,
                          const Matrix& y_bipolar, double ridge = 0.0) {
  if (x.rows() < 1) throw DimensionError("batch_train: no samples");
  if (y_bipolar.rows() != x.rows()) {
    throw DimensionError("batch_train: X has " + std::to_string(x.rows()) +
                         " rows but Y has " + std::to_string(y_bipolar.rows()));
  }
  Matrix beta = pinv_normal(hidden_map(params, x), ridge) * y_bipolar;
  require_finite(beta, "batch_train");
  return beta;
}

/// Raw real-valued scores H beta, one row per sample.
inline Matrix predict_raw(const ElmParams& params, const Matrix& beta,
                          const Matrix& x) {
  if (beta.rows() != params.n_hidden()) {
    throw DimensionError("predict_raw: beta has " +
                         std::to_string(beta.rows()) + " rows, model has " +
                         std::to_string(params.n_hidden()) + " hidden neurons");
  }
  return hidden_map(params, x) * beta;
}

}  // namespace osmlelm
