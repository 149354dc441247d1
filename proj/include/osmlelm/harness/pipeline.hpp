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

// Streaming train/evaluate driver and k-fold cross-validation.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osmlelm/dataio.hpp"
#include "osmlelm/elm.hpp"
#include "osmlelm/harness/config.hpp"
#include "osmlelm/metrics.hpp"
#include "osmlelm/multilabel.hpp"
#include "osmlelm/oselm.hpp"

namespace osmlelm {

/// Hidden layer, RLS state and threshold calibration of one streaming model.
///
/// Every partial_fit scores the incoming chunk with the current weights,
/// folds those scores into the calibration, then applies the RLS update.
class OnlineClassifier {
 public:
  OnlineClassifier(ElmParams params, std::size_t n_labels)
      : params_(std::move(params)), n_labels_(n_labels) {}

  OnlineClassifier(ElmParams params, OselmState state, ThresholdCalib calib)
      : params_(std::move(params)),
        n_labels_(static_cast<std::size_t>(state.n_labels())),
        state_(std::move(state)),
        calib_(std::move(calib)) {}

  const ElmParams& params() const noexcept { return params_; }
  const OselmState& state() const noexcept { return *state_; }
  const ThresholdCalib& calibration() const noexcept { return calib_; }
  bool initialized() const noexcept { return state_.has_value(); }
  std::size_t n_labels() const noexcept { return n_labels_; }

  void initialize(const Matrix& x0, std::span<const LabelSet> labels0,
                  double ridge) {
    state_ = init_phase(params_, x0, encode_bipolar(labels0, n_labels_), ridge);
  }

  void partial_fit(const Matrix& xc, std::span<const LabelSet> labels) {
    if (!state_) throw ConfigError("partial_fit: model is not initialized");
    const Matrix raw = predict_raw(params_, state_->beta, xc);
    calib_ = calibrate_rows(std::move(calib_), raw, labels);
    const Matrix y = encode_bipolar(labels, n_labels_);
    if (xc.rows() == 1) {
      state_ = update_sample(std::move(*state_), params_, xc.row(0).transpose(),
                             y.row(0).transpose());
    } else {
      state_ = update_chunk(std::move(*state_), params_, xc, y);
    }
  }

  Matrix scores(const Matrix& x) const {
    if (!state_) throw ConfigError("scores: model is not initialized");
    return predict_raw(params_, state_->beta, x);
  }

  /// Replaces the running calibration with one pass over (x, labels) using
  /// the current weights.
  void recalibrate(const Matrix& x, std::span<const LabelSet> labels) {
    calib_ = calibrate_rows(ThresholdCalib{}, scores(x), labels);
  }

 private:
  ElmParams params_;
  std::size_t n_labels_;
  std::optional<OselmState> state_;
  ThresholdCalib calib_;
};

/// Everything needed to reuse a trained model for prediction or more
/// streaming.
struct TrainedModel {
  OnlineClassifier classifier;
  double threshold = 0.0;
  ThresholdMode threshold_mode = ThresholdMode::kCalibrated;
  bool min_one = false;
  std::optional<NormStats> norm;
  std::uint64_t seed = 0;
  WeightRange weight_range;

  Matrix prepare(const Matrix& x) const {
    return norm ? normalize_apply(*norm, x) : x;
  }

  std::vector<LabelSet> predict(const Matrix& x) const {
    return decode_rows(classifier.scores(prepare(x)), threshold, min_one);
  }
};

struct Timing {
  double train_s = 0.0;
  double test_s = 0.0;
  double sequential_s = 0.0;
  std::size_t n_epochs = 0;
  double avg_epoch_s = 0.0;
};

struct RunReport {
  static constexpr std::string_view kSchema = "osmlelm.report/1";

  std::string dataset;
  RunConfig config;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_init_used = 0;
  MetricsReport metrics;
  Timing timing;
  double threshold = 0.0;
};

struct StreamResult {
  RunReport report;
  TrainedModel model;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::span<const LabelSet> slice(const std::vector<LabelSet>& v,
                                       std::size_t begin, std::size_t count) {
  return std::span<const LabelSet>(v).subspan(begin, count);
}

}  // namespace detail

/// Threshold from the chosen mode after training.
inline double resolve_threshold(ThresholdMode mode, OnlineClassifier& clf,
                                const Matrix& x_train,
                                std::span<const LabelSet> train_labels) {
  switch (mode) {
    case ThresholdMode::kZero: return 0.0;
    case ThresholdMode::kRecalibrate:
      clf.recalibrate(x_train, train_labels);
      return threshold_value(clf.calibration());
    case ThresholdMode::kCalibrated: return threshold_value(clf.calibration());
  }
  return 0.0;
}

/// normalize -> encode -> initial block -> chunked RLS with calibration ->
/// threshold -> decode test split -> evaluate.
inline StreamResult run_stream(const RunConfig& cfg, const DatasetBundle& train,
                               const DatasetBundle& test) {
  cfg.validate();
  const std::size_t n0 = cfg.effective_n_init();
  if (train.size() <= n0) {
    throw ConfigError("run_stream: training split has " +
                      std::to_string(train.size()) +
                      " rows, needs more than the initial block of " +
                      std::to_string(n0));
  }
  if (test.size() == 0) throw ConfigError("run_stream: empty test split");
  if (train.m != test.m || train.x.cols() != test.x.cols()) {
    throw DimensionError("run_stream: train and test splits differ in shape");
  }

  std::optional<NormStats> norm;
  Matrix x_train = train.x;
  if (cfg.normalize) {
    norm = normalize_fit(train);
    x_train = normalize_apply(*norm, train.x);
  }

  OnlineClassifier clf(
      init_params(x_train.cols(), cfg.n_hidden, cfg.seed, cfg.weight_range),
      train.m);

  Timing timing;
  const auto t_train = detail::Clock::now();
  clf.initialize(x_train.topRows(static_cast<Index>(n0)),
                 detail::slice(train.labelsets, 0, n0), cfg.ridge);

  const auto t_seq = detail::Clock::now();
  for (std::size_t start = n0; start < train.size(); start += cfg.chunk_size) {
    const std::size_t c = std::min(cfg.chunk_size, train.size() - start);
    clf.partial_fit(x_train.middleRows(static_cast<Index>(start), static_cast<Index>(c)),
                    detail::slice(train.labelsets, start, c));
    ++timing.n_epochs;
  }
  timing.sequential_s = detail::seconds_since(t_seq);

  const double threshold =
      resolve_threshold(cfg.threshold_mode, clf, x_train, train.labelsets);
  timing.train_s = detail::seconds_since(t_train);
  timing.avg_epoch_s =
      timing.n_epochs > 0 ? timing.sequential_s / static_cast<double>(timing.n_epochs)
                          : 0.0;

  TrainedModel model{std::move(clf), threshold, cfg.threshold_mode,
                     cfg.min_one,    norm,      cfg.seed,
                     cfg.weight_range};

  const auto t_test = detail::Clock::now();
  const auto preds = model.predict(test.x);
  timing.test_s = detail::seconds_since(t_test);

  RunReport report;
  report.dataset = cfg.dataset_name;
  report.config = cfg;
  report.n_train = train.size();
  report.n_test = test.size();
  report.n_init_used = n0;
  report.metrics = evaluate(preds, test.labelsets, test.m);
  report.timing = timing;
  report.threshold = threshold;
  return StreamResult{std::move(report), std::move(model)};
}

/// Applies the config's optional shuffle, then the head/tail split.
inline std::pair<DatasetBundle, DatasetBundle> split_for(const RunConfig& cfg,
                                                         const DatasetBundle& all) {
  const DatasetBundle ordered =
      cfg.shuffle_seed ? shuffled(all, *cfg.shuffle_seed) : all;
  return split(ordered, cfg.effective_n_train(all.size()));
}

inline DatasetBundle load_for(const RunConfig& cfg) {
  if (cfg.dataset_path.empty()) throw ConfigError("no dataset path configured");
  return load_dataset(cfg.dataset_path, cfg.format, cfg.label_spec, cfg.delimiter);
}

inline StreamResult run_stream(const RunConfig& cfg, const DatasetBundle& all) {
  auto [train, test] = split_for(cfg, all);
  return run_stream(cfg, train, test);
}

inline RunReport run_stream(const RunConfig& cfg) {
  return run_stream(cfg, load_for(cfg)).report;
}

/// Predicts with a trained model and scores against truth.
inline RunReport evaluate_model(const TrainedModel& model,
                                const DatasetBundle& test,
                                const std::string& dataset = {}) {
  if (test.size() == 0) throw ConfigError("evaluate_model: empty dataset");
  if (test.m != model.classifier.n_labels()) {
    throw DimensionError("evaluate_model: dataset has " + std::to_string(test.m) +
                         " labels, model has " +
                         std::to_string(model.classifier.n_labels()));
  }
  RunReport report;
  const auto t0 = detail::Clock::now();
  const auto preds = model.predict(test.x);
  report.timing.test_s = detail::seconds_since(t0);
  report.dataset = dataset;
  report.n_test = test.size();
  report.metrics = evaluate(preds, test.labelsets, test.m);
  report.threshold = model.threshold;
  report.config.n_hidden = model.classifier.params().n_hidden();
  report.config.seed = model.seed;
  report.config.weight_range = model.weight_range;
  report.config.ridge = model.classifier.state().ridge_used;
  report.config.threshold_mode = model.threshold_mode;
  report.config.min_one = model.min_one;
  report.config.normalize = model.norm.has_value();
  return report;
}

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation, k - 1 denominator
};

struct CvReport {
  static constexpr std::string_view kSchema = "osmlelm.cv/1";

  std::string dataset;
  RunConfig config;
  std::size_t k = 0;
  std::vector<MetricsReport> folds;
  /// Row indices (into the loaded order) tested by each fold.
  std::vector<std::vector<std::size_t>> fold_rows;
  MetricSummary hamming_loss, accuracy, precision, recall, f1;
};

inline MetricSummary summarize(const std::vector<double>& v) {
  MetricSummary s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

/// Contiguous folds over a seeded permutation; the first N mod k folds get one
/// extra row.
inline std::vector<std::vector<std::size_t>> cv_folds(std::size_t n,
                                                      std::size_t k,
                                                      std::uint64_t seed) {
  if (k < 2) throw ConfigError("cv: k must be >= 2");
  if (k > n) {
    throw ConfigError("cv: k = " + std::to_string(k) + " exceeds " +
                      std::to_string(n) + " samples");
  }
  const auto perm = seeded_permutation(n, seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                    perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

/// Each fold is the test set once; the remaining rows stream in permuted
/// order. Normalization and calibration are fold-local. Fold f draws its
/// hidden layer from seed + f.
inline CvReport run_cv(const RunConfig& cfg, const DatasetBundle& all,
                       std::size_t k) {
  cfg.validate();
  CvReport out;
  out.dataset = cfg.dataset_name;
  out.config = cfg;
  out.k = k;
  out.fold_rows = cv_folds(all.size(), k, cfg.seed);
  std::vector<double> hl, acc, prec, rec, f1;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows;
    for (std::size_t g = 0; g < k; ++g) {
      if (g == f) continue;
      train_rows.insert(train_rows.end(), out.fold_rows[g].begin(),
                        out.fold_rows[g].end());
    }
    RunConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + f;
    const auto res = run_stream(fold_cfg, select_rows(all, train_rows),
                                select_rows(all, out.fold_rows[f]));
    const auto& m = res.report.metrics;
    out.folds.push_back(m);
    hl.push_back(m.hamming_loss);
    acc.push_back(m.accuracy);
    prec.push_back(m.precision);
    rec.push_back(m.recall);
    f1.push_back(m.f1);
  }
  out.hamming_loss = summarize(hl);
  out.accuracy = summarize(acc);
  out.precision = summarize(prec);
  out.recall = summarize(rec);
  out.f1 = summarize(f1);
  return out;
}

}  // namespace osmlelm
