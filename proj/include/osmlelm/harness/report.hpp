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

// Report rendering. JSON keys are emitted in a fixed order:
//   schema_version, dataset, config{...}, metrics{...}, timing{...}, threshold

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "osmlelm/harness/pipeline.hpp"

namespace osmlelm {

enum class ReportFormat { kJson, kText };

inline std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::kJson;
  if (s == "text") return ReportFormat::kText;
  return std::nullopt;
}

inline nlohmann::ordered_json config_json(const RunConfig& cfg,
                                          std::size_t n_train,
                                          std::size_t n_init_used) {
  nlohmann::ordered_json j;
  j["dataset_path"] = cfg.dataset_path;
  j["format"] = cfg.format == DataFormat::kArff ? "arff" : "csv";
  j["labels"] = cfg.label_spec.to_string();
  j["n_train"] = n_train;
  j["shuffle_seed"] = cfg.shuffle_seed ? nlohmann::ordered_json(*cfg.shuffle_seed)
                                       : nlohmann::ordered_json(nullptr);
  j["n_hidden"] = cfg.n_hidden;
  j["activation"] = activation_name(ActivationKind::kSigmoid);
  j["seed"] = cfg.seed;
  j["generator"] = SeededRng::kAlgorithm;
  j["weight_range"] = {cfg.weight_range.lo, cfg.weight_range.hi};
  j["n_init"] = cfg.n_init;
  j["n_init_used"] = n_init_used;
  j["chunk_size"] = cfg.chunk_size;
  j["ridge"] = cfg.ridge;
  j["threshold_mode"] = threshold_mode_name(cfg.threshold_mode);
  j["min_one"] = cfg.min_one;
  j["normalize"] = cfg.normalize;
  return j;
}

inline nlohmann::ordered_json metrics_json(const MetricsReport& m) {
  nlohmann::ordered_json j;
  j["hamming_loss"] = m.hamming_loss;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["n_samples"] = m.n_samples;
  j["n_labels"] = m.n_labels;
  return j;
}

inline nlohmann::ordered_json report_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = RunReport::kSchema;
  j["dataset"] = r.dataset;
  j["config"] = config_json(r.config, r.n_train, r.n_init_used);
  j["metrics"] = metrics_json(r.metrics);
  j["timing"] = {{"train_s", r.timing.train_s},
                 {"test_s", r.timing.test_s},
                 {"n_epochs", r.timing.n_epochs},
                 {"avg_epoch_s", r.timing.avg_epoch_s},
                 {"sequential_s", r.timing.sequential_s}};
  j["threshold"] = r.threshold;
  return j;
}

inline nlohmann::ordered_json summary_json(const MetricSummary& s) {
  return {{"mean", s.mean}, {"std", s.std}};
}

inline nlohmann::ordered_json cv_json(const CvReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = CvReport::kSchema;
  j["dataset"] = r.dataset;
  j["config"] = config_json(r.config, 0, r.config.effective_n_init());
  j["k"] = r.k;
  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (const auto& f : r.folds) folds.push_back(metrics_json(f));
  j["folds"] = std::move(folds);
  j["summary"] = {{"hamming_loss", summary_json(r.hamming_loss)},
                  {"accuracy", summary_json(r.accuracy)},
                  {"precision", summary_json(r.precision)},
                  {"recall", summary_json(r.recall)},
                  {"f1", summary_json(r.f1)}};
  return j;
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace detail

inline std::string report_text(const RunReport& r) {
  using detail::fmt;
  using detail::pad;
  std::ostringstream os;
  os << "dataset " << (r.dataset.empty() ? "-" : r.dataset) << "  train "
     << r.n_train << "  test " << r.n_test << "  labels " << r.metrics.n_labels
     << "  hidden " << r.config.n_hidden << "  seed " << r.config.seed << '\n';
  os << pad("Hamming Loss", 14) << pad("Accuracy", 12) << pad("Precision", 12)
     << pad("Recall", 12) << pad("F1 measure", 12) << '\n';
  os << pad(fmt("%.4f", r.metrics.hamming_loss), 14)
     << pad(fmt("%.4f", r.metrics.accuracy), 12)
     << pad(fmt("%.4f", r.metrics.precision), 12)
     << pad(fmt("%.4f", r.metrics.recall), 12) << pad(fmt("%.4f", r.metrics.f1), 12)
     << '\n';
  os << pad("train_s", 14) << pad("test_s", 12) << pad("n_epochs", 12)
     << pad("avg_epoch_s", 14) << pad("threshold", 12) << '\n';
  os << pad(fmt("%.6f", r.timing.train_s), 14) << pad(fmt("%.6f", r.timing.test_s), 12)
     << pad(std::to_string(r.timing.n_epochs), 12)
     << pad(fmt("%.8f", r.timing.avg_epoch_s), 14) << pad(fmt("%.6f", r.threshold), 12)
     << '\n';
  return os.str();
}

inline std::string cv_text(const CvReport& r) {
  using detail::fmt;
  using detail::pad;
  std::ostringstream os;
  os << "dataset " << (r.dataset.empty() ? "-" : r.dataset) << "  " << r.k
     << "-fold cross-validation\n";
  os << pad("fold", 6) << pad("Hamming Loss", 14) << pad("Accuracy", 12)
     << pad("Precision", 12) << pad("Recall", 12) << pad("F1 measure", 12) << '\n';
  for (std::size_t f = 0; f < r.folds.size(); ++f) {
    const auto& m = r.folds[f];
    os << pad(std::to_string(f), 6) << pad(fmt("%.4f", m.hamming_loss), 14)
       << pad(fmt("%.4f", m.accuracy), 12) << pad(fmt("%.4f", m.precision), 12)
       << pad(fmt("%.4f", m.recall), 12) << pad(fmt("%.4f", m.f1), 12) << '\n';
  }
  auto row = [&](const char* name, const MetricSummary& s) {
    os << pad(name, 14) << pad(fmt("%.4f", s.mean), 10) << " +/- "
       << fmt("%.4f", s.std) << '\n';
  };
  row("Hamming Loss", r.hamming_loss);
  row("Accuracy", r.accuracy);
  row("Precision", r.precision);
  row("Recall", r.recall);
  row("F1 measure", r.f1);
  return os.str();
}

inline std::string emit_report(const RunReport& r, ReportFormat format) {
  return format == ReportFormat::kJson ? report_json(r).dump(2) + "\n"
                                       : report_text(r);
}

inline std::string emit_report(const CvReport& r, ReportFormat format) {
  return format == ReportFormat::kJson ? cv_json(r).dump(2) + "\n" : cv_text(r);
}

}  // namespace osmlelm
