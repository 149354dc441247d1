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

#include "osmlelm/elm.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oracles.hpp"

namespace osmlelm {
namespace {

using testing::max_abs;

TEST(InitParams, DeterministicPerSeed) {
  EXPECT_EQ(init_params(3, 5, 42, {-1.0, 1.0}), init_params(3, 5, 42, {-1.0, 1.0}));
}

TEST(InitParams, ShapeContract) {
  const auto p = init_params(3, 5, 42);
  EXPECT_EQ(p.weights().rows(), 5);
  EXPECT_EQ(p.weights().cols(), 3);
  EXPECT_EQ(p.bias().size(), 5);
  EXPECT_EQ(p.n_features(), 3);
  EXPECT_EQ(p.n_hidden(), 5);
  EXPECT_EQ(p.activation(), ActivationKind::kSigmoid);
}

TEST(InitParams, DifferentSeedsDiffer) {
  EXPECT_NE(init_params(3, 5, 42).weights(), init_params(3, 5, 43).weights());
}

TEST(InitParams, DrawsWeightsThenBiasFromOneStream) {
  SeededRng rng(42);
  const Matrix w = rand_uniform(rng, 5, 3, -1.0, 1.0);
  const Matrix b = rand_uniform(rng, 5, 1, -1.0, 1.0);
  const auto p = init_params(3, 5, 42);
  EXPECT_EQ(p.weights(), w);
  EXPECT_EQ(Matrix(p.bias()), b);
}

TEST(InitParams, RejectsBadArguments) {
  EXPECT_THROW(init_params(0, 5, 1), ConfigError);
  EXPECT_THROW(init_params(3, 0, 1), ConfigError);
  EXPECT_THROW(init_params(3, 5, 1, {1.0, -1.0}), ConfigError);
}

TEST(HiddenMap, ZeroWeightsGiveHalf) {
  const ElmParams p(Matrix::Zero(4, 3), Vector::Zero(4));
  std::mt19937_64 gen(1);
  const Matrix h = hidden_map(p, testing::gaussian(gen, 6, 3));
  EXPECT_EQ(h.rows(), 6);
  EXPECT_EQ(h.cols(), 4);
  EXPECT_TRUE((h.array() == 0.5).all());
}

TEST(HiddenMap, SigmoidOfLogThreeIsThreeQuarters) {
  const ElmParams p(Matrix::Constant(1, 1, std::log(3.0)), Vector::Zero(1));
  const Matrix h = hidden_map(p, Matrix::Ones(1, 1));
  EXPECT_NEAR(h(0, 0), 0.75, 1e-15);
}

TEST(HiddenMap, MatchesScalarLoop) {
  std::mt19937_64 gen(2);
  const auto p = init_params(4, 9, 77);
  const Matrix x = testing::gaussian(gen, 10, 4);
  const Matrix h = hidden_map(p, x);
  EXPECT_LE(max_abs(h - testing::naive_hidden(p, x)), 1e-12);
  EXPECT_GT(h.minCoeff(), 0.0);
  EXPECT_LT(h.maxCoeff(), 1.0);
}

TEST(HiddenMap, RejectsFeatureMismatch) {
  const auto p = init_params(4, 3, 1);
  EXPECT_THROW(hidden_map(p, Matrix::Zero(2, 5)), DimensionError);
}

TEST(BatchTrain, ZeroTargetGivesZeroWeights) {
  std::mt19937_64 gen(3);
  const auto p = init_params(3, 4, 9);
  const Matrix beta = batch_train(p, testing::gaussian(gen, 20, 3), Matrix::Zero(20, 2));
  EXPECT_EQ(beta.rows(), 4);
  EXPECT_EQ(beta.cols(), 2);
  EXPECT_LE(max_abs(beta), 0.0);
}

TEST(BatchTrain, SquareSystemInterpolates) {
  std::mt19937_64 gen(4);
  const auto p = init_params(6, 6, 2026, {-4.0, 4.0});
  const Matrix x = testing::gaussian(gen, 6, 6);
  const Matrix y = testing::random_bipolar(gen, 6, 3);
  const Matrix beta = batch_train(p, x, y);
  EXPECT_LE(max_abs(hidden_map(p, x) * beta - y), 1e-8);
}

TEST(BatchTrain, LocallyOptimal) {
  std::mt19937_64 gen(5);
  const auto p = init_params(5, 8, 31);
  const Matrix x = testing::gaussian(gen, 60, 5);
  const Matrix y = testing::random_bipolar(gen, 60, 3);
  const Matrix beta = batch_train(p, x, y);
  const Matrix h = hidden_map(p, x);
  const double best = (h * beta - y).norm();
  for (int i = 0; i < 100; ++i) {
    Matrix delta = testing::gaussian(gen, beta.rows(), beta.cols());
    delta *= 1e-3 / delta.norm();
    EXPECT_GE((h * (beta + delta) - y).norm(), best) << "perturbation " << i;
  }
}

TEST(BatchTrain, RejectsRowMismatch) {
  const auto p = init_params(2, 2, 1);
  EXPECT_THROW(batch_train(p, Matrix::Zero(5, 2), Matrix::Zero(4, 1)), DimensionError);
}

TEST(BatchTrain, SingularWithoutRidge) {
  const auto p = init_params(2, 10, 1);
  std::mt19937_64 gen(6);
  EXPECT_THROW(batch_train(p, testing::gaussian(gen, 4, 2), Matrix::Ones(4, 1)),
               NumericError);
}

TEST(PredictRaw, ZeroWeightsGiveZero) {
  const auto p = init_params(3, 4, 1);
  std::mt19937_64 gen(8);
  const Matrix y = predict_raw(p, Matrix::Zero(4, 5), testing::gaussian(gen, 7, 3));
  EXPECT_EQ(y.rows(), 7);
  EXPECT_EQ(y.cols(), 5);
  EXPECT_TRUE((y.array() == 0.0).all());
}

TEST(PredictRaw, ScalarProduct) {
  const ElmParams p(Matrix::Zero(1, 1), Vector::Zero(1));  // H = [0.5]
  const Matrix y = predict_raw(p, Matrix::Constant(1, 1, 2.0), Matrix::Ones(1, 1));
  EXPECT_DOUBLE_EQ(y(0, 0), 1.0);
}

TEST(PredictRaw, EqualsTwoStepComposition) {
  std::mt19937_64 gen(9);
  const auto p = init_params(4, 6, 12);
  const Matrix x = testing::gaussian(gen, 11, 4);
  const Matrix beta = testing::gaussian(gen, 6, 3);
  const Matrix want = testing::naive_matmul(testing::naive_hidden(p, x), beta);
  EXPECT_LE(max_abs(predict_raw(p, beta, x) - want), 1e-12);
}

TEST(PredictRaw, ShapeContractAndErrors) {
  const auto p = init_params(3, 4, 1);
  for (Index n : {1, 2, 17}) {
    for (Index m : {1, 6}) {
      EXPECT_EQ(predict_raw(p, Matrix::Zero(4, m), Matrix::Zero(n, 3)).rows(), n);
      EXPECT_EQ(predict_raw(p, Matrix::Zero(4, m), Matrix::Zero(n, 3)).cols(), m);
    }
  }
  EXPECT_THROW(predict_raw(p, Matrix::Zero(5, 2), Matrix::Zero(1, 3)), DimensionError);
  EXPECT_THROW(predict_raw(p, Matrix::Zero(4, 2), Matrix::Zero(1, 2)), DimensionError);
}

TEST(BatchTrain, ResidualNonIncreasingAsNeuronsGrow) {
  std::mt19937_64 gen(10);
  const Matrix x = testing::gaussian(gen, 120, 6);
  const Matrix y = testing::random_bipolar(gen, 120, 4);
  const auto big = init_params(6, 40, 555);
  double prev = 1e300;
  for (Index k : {5, 10, 20, 40}) {
    const ElmParams p(big.weights().topRows(k), big.bias().head(k));
    const Matrix beta = batch_train(p, x, y);
    const double r = (hidden_map(p, x) * beta - y).norm();
    EXPECT_LE(r, prev * (1.0 + 1e-12)) << "n_hidden " << k;
    prev = r;
  }
}

TEST(BatchTrain, DeterministicBitForBit) {
  std::mt19937_64 gen(12);
  const Matrix x = testing::gaussian(gen, 50, 4);
  const Matrix y = testing::random_bipolar(gen, 50, 3);
  const auto p = init_params(4, 10, 99);
  EXPECT_EQ(batch_train(p, x, y), batch_train(init_params(4, 10, 99), x, y));
}

}  // namespace
}  // namespace osmlelm
