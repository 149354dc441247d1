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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osmlelm/numerics.hpp"

namespace osmlelm {

/// Subset of {0, ..., m-1}. Members are kept sorted and unique.
class LabelSet {
 public:
  using Label = std::uint32_t;

  LabelSet() = default;

  explicit LabelSet(std::size_t m) : m_(m) {}

  LabelSet(std::size_t m, std::vector<Label> members)
      : m_(m), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()),
                   members_.end());
    if (!members_.empty() && members_.back() >= m_) {
      throw DimensionError("LabelSet: label " + std::to_string(members_.back()) +
                           " out of range for m = " + std::to_string(m_));
    }
  }

  LabelSet(std::size_t m, std::initializer_list<Label> members)
      : LabelSet(m, std::vector<Label>(members)) {}

  /// Full label space {0, ..., m-1}.
  static LabelSet full(std::size_t m) {
    std::vector<Label> all(m);
    for (std::size_t i = 0; i < m; ++i) all[i] = static_cast<Label>(i);
    return LabelSet(m, std::move(all));
  }

  std::size_t dim() const noexcept { return m_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const std::vector<Label>& members() const noexcept { return members_; }

  bool contains(std::size_t label) const {
    return std::binary_search(members_.begin(), members_.end(),
                              static_cast<Label>(label));
  }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::size_t m_ = 0;
  std::vector<Label> members_;
};

/// +1 at member positions, -1 elsewhere.
inline Vector encode_bipolar(const LabelSet& labels) {
  Vector out = Vector::Constant(static_cast<Index>(labels.dim()), -1.0);
  for (auto l : labels.members()) out(static_cast<Index>(l)) = 1.0;
  return out;
}

/// Stacks encode_bipolar rows into an N x m target matrix.
inline Matrix encode_bipolar(std::span<const LabelSet> labelsets,
                             std::size_t m) {
  Matrix out = Matrix::Constant(static_cast<Index>(labelsets.size()),
                                static_cast<Index>(m), -1.0);
  for (std::size_t i = 0; i < labelsets.size(); ++i) {
    if (labelsets[i].dim() != m) {
      throw DimensionError("encode_bipolar: labelset " + std::to_string(i) +
                           " has dimension " +
                           std::to_string(labelsets[i].dim()) + ", expected " +
                           std::to_string(m));
    }
    for (auto l : labelsets[i].members()) {
      out(static_cast<Index>(i), static_cast<Index>(l)) = 1.0;
    }
  }
  return out;
}

/// Members are the positions scoring strictly above the threshold. With
/// min_one, an otherwise empty result becomes {argmax}, lowest index on ties.
template <typename Scores>
LabelSet decode(const Scores& y_raw, double threshold, bool min_one = false) {
  const auto m = static_cast<std::size_t>(y_raw.size());
  std::vector<LabelSet::Label> members;
  for (std::size_t i = 0; i < m; ++i) {
    if (y_raw[static_cast<Index>(i)] > threshold) {
      members.push_back(static_cast<LabelSet::Label>(i));
    }
  }
  if (members.empty() && min_one && m > 0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i) {
      if (y_raw[static_cast<Index>(i)] > y_raw[static_cast<Index>(best)]) best = i;
    }
    members.push_back(static_cast<LabelSet::Label>(best));
  }
  return LabelSet(m, std::move(members));
}

/// Decodes every row of an N x m score matrix.
inline std::vector<LabelSet> decode_rows(const Matrix& y_raw, double threshold,
                                         bool min_one = false) {
  std::vector<LabelSet> out;
  out.reserve(static_cast<std::size_t>(y_raw.rows()));
  for (Index i = 0; i < y_raw.rows(); ++i) {
    const Vector row = y_raw.row(i).transpose();
    out.push_back(decode(row, threshold, min_one));
  }
  return out;
}

/// Running extrema of raw scores: min over true-positive positions and max
/// over true-negative positions.
struct ThresholdCalib {
  std::optional<double> min_pos;
  std::optional<double> max_neg;
  std::uint64_t observations = 0;

  friend bool operator==(const ThresholdCalib&, const ThresholdCalib&) = default;
};

template <typename Scores>
ThresholdCalib calibrate_update(ThresholdCalib calib, const Scores& y_raw,
                                const LabelSet& truth) {
  const auto m = static_cast<std::size_t>(y_raw.size());
  if (truth.dim() != m) {
    throw DimensionError("calibrate_update: scores have " + std::to_string(m) +
                         " entries but the label space has " +
                         std::to_string(truth.dim()));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double v = y_raw[static_cast<Index>(i)];
    if (truth.contains(i)) {
      calib.min_pos = calib.min_pos ? std::min(*calib.min_pos, v) : v;
    } else {
      calib.max_neg = calib.max_neg ? std::max(*calib.max_neg, v) : v;
    }
  }
  ++calib.observations;
  return calib;
}

/// Folds every row of a score matrix into the calibration.
inline ThresholdCalib calibrate_rows(ThresholdCalib calib, const Matrix& y_raw,
                                     std::span<const LabelSet> truths) {
  if (static_cast<std::size_t>(y_raw.rows()) != truths.size()) {
    throw DimensionError("calibrate_rows: score rows and truths differ in count");
  }
  for (Index i = 0; i < y_raw.rows(); ++i) {
    const Vector row = y_raw.row(i).transpose();
    calib = calibrate_update(std::move(calib), row,
                             truths[static_cast<std::size_t>(i)]);
  }
  return calib;
}

/// Midpoint (min(Y_A) + max(Y_B)) / 2 of the two score populations.
inline double threshold_value(const ThresholdCalib& calib) {
  if (!calib.min_pos && !calib.max_neg) {
    throw NumericError(
        "threshold_value: calibration is empty (no positive and no negative "
        "label observations)");
  }
  if (!calib.min_pos) {
    throw NumericError(
        "threshold_value: calibration has no positive label observations");
  }
  if (!calib.max_neg) {
    throw NumericError(
        "threshold_value: calibration has no negative label observations");
  }
  return (*calib.min_pos + *calib.max_neg) / 2.0;
}

struct DatasetStats {
  double label_cardinality = 0.0;
  double label_density = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_labels = 0;
};

/// Label cardinality (mean set size) and density (cardinality / m).
inline DatasetStats dataset_stats(std::span<const LabelSet> labelsets,
                                  std::size_t m) {
  if (labelsets.empty()) throw DimensionError("dataset_stats: empty sequence");
  if (m == 0) throw DimensionError("dataset_stats: m must be positive");
  std::size_t total = 0;
  for (const auto& s : labelsets) {
    if (s.dim() != m) {
      throw DimensionError("dataset_stats: inconsistent label dimension");
    }
    total += s.size();
  }
  DatasetStats out;
  out.n_samples = labelsets.size();
  out.n_labels = m;
  out.label_cardinality =
      static_cast<double>(total) / static_cast<double>(labelsets.size());
  out.label_density = out.label_cardinality / static_cast<double>(m);
  return out;
}

}  // namespace osmlelm
