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

// Dense arithmetic substrate: matrix aliases, SPD solves via a hand-rolled
// Cholesky factorization, normal-equation pseudoinverse and a portable seeded
// random generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "osmlelm/error.hpp"

namespace osmlelm {

/// Dense real matrix, row-major storage.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, std::string_view op) {
  if (!m.allFinite()) {
    throw NumericError(std::string(op) + ": result contains non-finite values");
  }
}

/// Deterministic generator with a fixed, documented algorithm.
///
/// Bits come from std::mt19937_64, whose output sequence is pinned by the
/// standard. Reals use the top 53 bits as a mantissa, so draws are identical on
/// every conforming platform (unlike std::uniform_real_distribution).
class SeededRng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/u53";

  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    double v = lo + (hi - lo) * next_unit();
    // lo + (hi-lo)*u can round up to hi for u close to 1.
    if (v >= hi) v = std::nextafter(hi, lo);
    return v;
  }

  /// Uniform integer on [0, n), unbiased by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ConfigError("SeededRng::below: n must be positive");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Entries i.i.d. uniform on [lo, hi), filled in row-major order.
inline Matrix rand_uniform(SeededRng& rng, Index rows, Index cols, double lo,
                           double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("rand_uniform: require finite lo < hi");
  }
  if (rows < 0 || cols < 0) throw DimensionError("rand_uniform: negative shape");
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = rng.uniform(lo, hi);
  return out;
}

/// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
class Cholesky {
 public:
  /// Relative symmetry tolerance for inputs.
  static constexpr double kSymmetryTol = 1e-9;

  Cholesky(const Matrix& a, std::string_view op = "cholesky") : op_(op) {
    if (a.rows() != a.cols()) {
      throw DimensionError(op_ + ": matrix must be square, got " + shape_str(a));
    }
    if (!a.allFinite()) throw NumericError(op_ + ": non-finite input");
    check_symmetric(a);
    factor(a);
  }

  Index size() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }

  /// Solves A X = B.
  Matrix solve(const Matrix& b) const {
    const Index n = lower_.rows();
    if (b.rows() != n) {
      throw DimensionError(op_ + ": right-hand side has " +
                           std::to_string(b.rows()) + " rows, expected " +
                           std::to_string(n));
    }
    Matrix x = b;
    // Forward: L y = b.
    for (Index i = 0; i < n; ++i) {
      for (Index p = 0; p < i; ++p) {
        const double l = lower_(i, p);
        if (l != 0.0) x.row(i) -= l * x.row(p);
      }
      x.row(i) /= lower_(i, i);
    }
    // Backward: L^T x = y.
    for (Index i = n - 1; i >= 0; --i) {
      for (Index p = i + 1; p < n; ++p) {
        const double l = lower_(p, i);
        if (l != 0.0) x.row(i) -= l * x.row(p);
      }
      x.row(i) /= lower_(i, i);
    }
    require_finite(x, op_);
    return x;
  }

 private:
  void check_symmetric(const Matrix& a) const {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = i + 1; j < a.cols(); ++j) {
        if (std::abs(a(i, j) - a(j, i)) > kSymmetryTol * scale) {
          throw NumericError(op_ + ": matrix is not symmetric at (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
        }
      }
    }
  }

  void factor(const Matrix& a) {
    const Index n = a.rows();
    lower_ = Matrix::Zero(n, n);
    // Pivots below this are treated as numerically zero.
    const double floor = static_cast<double>(std::max<Index>(n, 1)) *
                         std::numeric_limits<double>::epsilon() *
                         (n > 0 ? a.diagonal().cwiseAbs().maxCoeff() : 0.0);
    for (Index j = 0; j < n; ++j) {
      double d = a(j, j);
      for (Index p = 0; p < j; ++p) d -= lower_(j, p) * lower_(j, p);
      if (!(d > floor)) {
        throw FactorizationError(op_, static_cast<std::size_t>(j), d);
      }
      const double ljj = std::sqrt(d);
      lower_(j, j) = ljj;
      for (Index i = j + 1; i < n; ++i) {
        double s = a(i, j);
        for (Index p = 0; p < j; ++p) s -= lower_(i, p) * lower_(j, p);
        lower_(i, j) = s / ljj;
      }
    }
  }

  std::string op_;
  Matrix lower_;
};

/// Solves A X = B for symmetric positive definite A.
inline Matrix solve_spd(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) {
    throw DimensionError("solve_spd: A must be square, got " + shape_str(a));
  }
  if (b.rows() != a.rows()) {
    throw DimensionError("solve_spd: A is " + shape_str(a) + " but B is " +
                         shape_str(b));
  }
  return Cholesky(a, "solve_spd").solve(b);
}

/// H^T H + ridge I, with the upper triangle mirrored from the lower so the
/// result is exactly symmetric.
inline Matrix gram(const Matrix& h, double ridge = 0.0) {
  Matrix g = h.transpose() * h;
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index j = 0; j < i; ++j) g(j, i) = g(i, j);
    g(i, i) += ridge;
  }
  return g;
}

/// (H^T H + ridge I)^{-1} H^T.
inline Matrix pinv_normal(const Matrix& h, double ridge = 0.0) {
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw ConfigError("pinv_normal: ridge must be finite and non-negative");
  }
  try {
    return solve_spd(gram(h, ridge), h.transpose());
  } catch (const FactorizationError& e) {
    throw NumericError(
        "pinv_normal: H^T H is singular (H is rank-deficient); supply more "
        "rows or a positive ridge [" +
        std::string(e.what()) + "]");
  }
}

}  // namespace osmlelm
