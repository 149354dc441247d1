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
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "osmlelm/dataio.hpp"
#include "osmlelm/elm.hpp"

namespace osmlelm {

enum class ThresholdMode { kCalibrated, kZero, kRecalibrate };

constexpr std::string_view threshold_mode_name(ThresholdMode m) {
  switch (m) {
    case ThresholdMode::kCalibrated: return "calibrated";
    case ThresholdMode::kZero: return "zero";
    case ThresholdMode::kRecalibrate: return "recalibrate";
  }
  return "calibrated";
}

inline std::optional<ThresholdMode> parse_threshold_mode(std::string_view s) {
  if (s == "calibrated") return ThresholdMode::kCalibrated;
  if (s == "zero") return ThresholdMode::kZero;
  if (s == "recalibrate") return ThresholdMode::kRecalibrate;
  return std::nullopt;
}

struct RunConfig {
  std::string dataset_name;
  std::string dataset_path;
  DataFormat format = DataFormat::kArff;
  LabelSpec label_spec;
  char delimiter = ',';
  /// Training rows taken from the head of the file; 0 means two thirds.
  std::size_t n_train = 0;
  /// Shuffle rows before splitting; file order when absent.
  std::optional<std::uint64_t> shuffle_seed;

  Index n_hidden = 100;
  std::uint64_t seed = 1;
  WeightRange weight_range;
  /// Initial block size N0. Raised to n_hidden when ridge is zero.
  std::size_t n_init = 0;
  std::size_t chunk_size = 1;
  double ridge = 0.0;
  ThresholdMode threshold_mode = ThresholdMode::kCalibrated;
  bool min_one = false;
  bool normalize = true;
  std::string output_path;

  /// Every problem found, empty when valid.
  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (n_hidden < 1) out.emplace_back("n_hidden must be >= 1");
    if (chunk_size < 1) out.emplace_back("chunk_size must be >= 1");
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
      out.emplace_back("ridge must be finite and non-negative");
    }
    if (!(weight_range.lo < weight_range.hi)) {
      out.emplace_back("weight range requires lo < hi");
    }
    if (ridge > 0.0 && n_init < 1) {
      out.emplace_back("n_init must be >= 1 when ridge > 0");
    }
    return out;
  }

  void validate() const {
    const auto p = problems();
    if (p.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& s : p) msg += "\n  - " + s;
    throw ConfigError(msg);
  }

  /// N0 actually used: max(n_hidden, n_init) without ridge so H0^T H0 can be
  /// invertible; n_init as given otherwise.
  std::size_t effective_n_init() const {
    if (ridge > 0.0) return std::max<std::size_t>(n_init, 1);
    return std::max(n_init, static_cast<std::size_t>(n_hidden));
  }

  std::size_t effective_n_train(std::size_t n_rows) const {
    return n_train > 0 ? n_train : (2 * n_rows) / 3;
  }
};

/// ceil((n_train - n_init) / chunk): sequential blocks after the initial block.
inline std::size_t epoch_count(std::size_t n_train, std::size_t n_init,
                               std::size_t chunk) {
  if (chunk == 0) throw ConfigError("epoch_count: chunk must be positive");
  if (n_train <= n_init) return 0;
  return (n_train - n_init + chunk - 1) / chunk;
}

/// Per-dataset defaults kept in configs/datasets.json.
///
/// Keys: file, format, labels, n_train, n_hidden, n_init, chunk_size, ridge,
/// threshold_mode, min_one, normalize. Missing keys leave the config as is.
inline void apply_preset(RunConfig& cfg, const std::string& name,
                         const nlohmann::json& preset,
                         const std::filesystem::path& data_dir = {}) {
  try {
    cfg.dataset_name = name;
    if (preset.contains("file")) {
      cfg.dataset_path = (data_dir / preset.at("file").get<std::string>()).string();
    }
    if (preset.contains("format")) {
      const auto f = parse_format(preset.at("format").get<std::string>());
      if (!f) throw ConfigError("preset '" + name + "': unknown format");
      cfg.format = *f;
    }
    if (preset.contains("labels")) {
      cfg.label_spec = LabelSpec::parse(preset.at("labels").get<std::string>());
    }
    if (preset.contains("n_train")) cfg.n_train = preset.at("n_train").get<std::size_t>();
    if (preset.contains("n_hidden")) cfg.n_hidden = preset.at("n_hidden").get<Index>();
    if (preset.contains("n_init")) cfg.n_init = preset.at("n_init").get<std::size_t>();
    if (preset.contains("chunk_size")) {
      cfg.chunk_size = preset.at("chunk_size").get<std::size_t>();
    }
    if (preset.contains("ridge")) cfg.ridge = preset.at("ridge").get<double>();
    if (preset.contains("threshold_mode")) {
      const auto m = parse_threshold_mode(preset.at("threshold_mode").get<std::string>());
      if (!m) throw ConfigError("preset '" + name + "': unknown threshold_mode");
      cfg.threshold_mode = *m;
    }
    if (preset.contains("min_one")) cfg.min_one = preset.at("min_one").get<bool>();
    if (preset.contains("normalize")) cfg.normalize = preset.at("normalize").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("preset '" + name + "': " + e.what());
  }
}

inline nlohmann::json load_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open preset file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("preset file '" + path + "': " + e.what());
  }
}

inline RunConfig preset_config(const std::string& presets_path,
                               const std::string& name,
                               const std::filesystem::path& data_dir = {}) {
  const auto all = load_presets(presets_path);
  if (!all.contains(name)) {
    throw ConfigError("no preset named '" + name + "' in " + presets_path);
  }
  RunConfig cfg;
  apply_preset(cfg, name, all.at(name), data_dir);
  return cfg;
}

}  // namespace osmlelm
