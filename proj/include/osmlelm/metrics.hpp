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

// Example-based multi-label metrics. Each quantity is computed per sample and
// then averaged over samples:
//
//   hamming loss  |P xor T| / m
//   accuracy      |P n T| / |P u T|
//   precision     |P n T| / |P|
//   recall        |P n T| / |T|
//   F1            2 |P n T| / (|P| + |T|)
//
// 0/0 conventions: when P and T are both empty every ratio is 1; when exactly
// one is empty, ratios whose denominator vanishes are 0.
//
// Precision divides by the predicted set and recall by the true set.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>

#include "osmlelm/multilabel.hpp"

namespace osmlelm {

struct MetricsReport {
  double hamming_loss = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_labels = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Per-sample scores; the report is their mean.
struct SampleScores {
  double hamming_loss;
  double accuracy;
  double precision;
  double recall;
  double f1;
};

inline std::size_t intersection_size(const LabelSet& a, const LabelSet& b) {
  const auto& x = a.members();
  const auto& y = b.members();
  std::size_t n = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

inline SampleScores score_sample(const LabelSet& pred, const LabelSet& truth) {
  const std::size_t m = truth.dim();
  const auto inter = static_cast<double>(intersection_size(pred, truth));
  const auto np = static_cast<double>(pred.size());
  const auto nt = static_cast<double>(truth.size());
  const double uni = np + nt - inter;
  SampleScores s{};
  s.hamming_loss = (uni - inter) / static_cast<double>(m);
  if (pred.empty() && truth.empty()) {
    s.accuracy = s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  s.accuracy = inter / uni;
  s.precision = np > 0 ? inter / np : 0.0;
  s.recall = nt > 0 ? inter / nt : 0.0;
  s.f1 = 2.0 * inter / (np + nt);
  return s;
}

inline MetricsReport evaluate(std::span<const LabelSet> preds,
                              std::span<const LabelSet> truths, std::size_t m) {
  if (preds.size() != truths.size()) {
    throw DimensionError("evaluate: " + std::to_string(preds.size()) +
                         " predictions but " + std::to_string(truths.size()) +
                         " truths");
  }
  if (preds.empty()) throw DimensionError("evaluate: empty input");
  if (m == 0) throw DimensionError("evaluate: m must be positive");
  MetricsReport r;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].dim() != m || truths[i].dim() != m) {
      throw DimensionError("evaluate: sample " + std::to_string(i) +
                           " has inconsistent label dimension");
    }
    const SampleScores s = score_sample(preds[i], truths[i]);
    r.hamming_loss += s.hamming_loss;
    r.accuracy += s.accuracy;
    r.precision += s.precision;
    r.recall += s.recall;
    r.f1 += s.f1;
  }
  const auto n = static_cast<double>(preds.size());
  r.hamming_loss /= n;
  r.accuracy /= n;
  r.precision /= n;
  r.recall /= n;
  r.f1 /= n;
  r.n_samples = preds.size();
  r.n_labels = m;
  return r;
}

}  // namespace osmlelm
