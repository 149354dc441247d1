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

// osmlelm: train, evaluate, stream, cross-validate and inspect multi-label
// datasets.
//
// Exit codes: 0 success, 1 usage, 2 dimension, 3 numeric, 4 parse, 5 config,
// 6 io, 7 format, 10 unexpected.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "osmlelm/harness/config.hpp"
#include "osmlelm/harness/model_io.hpp"
#include "osmlelm/harness/pipeline.hpp"
#include "osmlelm/harness/report.hpp"

namespace {

using namespace osmlelm;

#ifndef OSMLELM_DEFAULT_PRESETS
#define OSMLELM_DEFAULT_PRESETS "configs/datasets.json"
#endif

struct DataOptions {
  std::optional<std::string> data;
  std::optional<std::string> format;
  std::optional<std::string> labels;
  std::optional<std::string> preset;
  std::string presets = OSMLELM_DEFAULT_PRESETS;
  std::string data_dir = ".";
  std::optional<char> delimiter;
  std::optional<std::size_t> n_train;
  std::optional<std::uint64_t> shuffle_seed;
};

struct TrainOptions {
  std::optional<Index> hidden;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_init;
  std::optional<std::size_t> chunk;
  std::optional<double> ridge;
  std::optional<std::string> threshold;
  bool min_one = false;
  bool no_normalize = false;
};

struct OutputOptions {
  std::string out;
  std::string report_format = "json";
};

void add_data_options(CLI::App* app, DataOptions& o) {
  app->add_option("--data", o.data, "Dataset file");
  app->add_option("--format", o.format, "Dataset format")
      ->check(CLI::IsMember({"arff", "csv"}));
  app->add_option("--labels", o.labels,
                  "Label columns: auto | trailing:N | leading:N | names:a,b | xml:PATH");
  app->add_option("--preset", o.preset, "Dataset preset name (yeast, scene, ...)");
  app->add_option("--presets", o.presets, "Preset file")->capture_default_str();
  app->add_option("--data-dir", o.data_dir, "Directory for preset dataset files")
      ->capture_default_str();
  app->add_option("--delimiter", o.delimiter, "Field delimiter for csv");
  app->add_option("--n-train", o.n_train, "Training rows taken from the head");
  app->add_option("--shuffle-seed", o.shuffle_seed,
                  "Shuffle rows with this seed before splitting");
}

void add_train_options(CLI::App* app, TrainOptions& o) {
  app->add_option("--hidden", o.hidden, "Hidden neurons");
  app->add_option("--seed", o.seed, "Hidden-layer seed");
  app->add_option("--n-init", o.n_init, "Initial block size N0");
  app->add_option("--chunk", o.chunk, "Samples per sequential update");
  app->add_option("--ridge", o.ridge, "Ridge added to H0^T H0");
  app->add_option("--threshold", o.threshold, "Threshold mode")
      ->check(CLI::IsMember({"calibrated", "zero", "recalibrate"}));
  app->add_flag("--min-one", o.min_one, "Predict the top label when none pass");
  app->add_flag("--no-normalize", o.no_normalize, "Disable min-max scaling");
}

void add_output_options(CLI::App* app, OutputOptions& o) {
  app->add_option("--out", o.out, "Output file (stdout when omitted)");
  app->add_option("--report-format", o.report_format, "Report format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
}

RunConfig build_config(const DataOptions& d, const TrainOptions& t) {
  RunConfig cfg;
  if (d.preset) {
    cfg = preset_config(d.presets, *d.preset, d.data_dir);
  }
  if (d.data) {
    cfg.dataset_path = *d.data;
    if (cfg.dataset_name.empty()) {
      cfg.dataset_name = std::filesystem::path(*d.data).stem().string();
    }
  }
  if (d.format) cfg.format = *parse_format(*d.format);
  if (d.labels) cfg.label_spec = LabelSpec::parse(*d.labels);
  if (d.delimiter) cfg.delimiter = *d.delimiter;
  if (d.n_train) cfg.n_train = *d.n_train;
  if (d.shuffle_seed) cfg.shuffle_seed = *d.shuffle_seed;
  if (t.hidden) cfg.n_hidden = *t.hidden;
  if (t.seed) cfg.seed = *t.seed;
  if (t.n_init) cfg.n_init = *t.n_init;
  if (t.chunk) cfg.chunk_size = *t.chunk;
  if (t.ridge) cfg.ridge = *t.ridge;
  if (t.threshold) cfg.threshold_mode = *parse_threshold_mode(*t.threshold);
  if (t.min_one) cfg.min_one = true;
  if (t.no_normalize) cfg.normalize = false;
  if (cfg.dataset_path.empty()) {
    throw ConfigError("no dataset: pass --data or --preset");
  }
  return cfg;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

ReportFormat report_format(const OutputOptions& o) {
  return *parse_report_format(o.report_format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online sequential multi-label ELM classifier"};
  app.require_subcommand(1);

  DataOptions data;
  TrainOptions train;
  OutputOptions output;

  auto* stream = app.add_subcommand("stream", "Stream-train, then evaluate on the test split");
  add_data_options(stream, data);
  add_train_options(stream, train);
  add_output_options(stream, output);
  std::string stream_model;
  stream->add_option("--save-model", stream_model, "Also write the trained model");

  auto* train_cmd = app.add_subcommand("train", "Stream-train and write a model file");
  add_data_options(train_cmd, data);
  add_train_options(train_cmd, train);
  std::string model_out;
  train_cmd->add_option("--out", model_out, "Model file")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a saved model");
  add_data_options(eval, data);
  add_output_options(eval, output);
  std::string model_in;
  bool eval_all = false;
  std::optional<std::uint64_t> eval_seed;
  eval->add_option("--model", model_in, "Model file")->required();
  eval->add_flag("--all", eval_all, "Evaluate every row instead of the test split");
  eval->add_option("--seed", eval_seed, "Accepted for uniformity; the model's seed is used");

  auto* cv = app.add_subcommand("cv", "k-fold cross-validation");
  add_data_options(cv, data);
  add_train_options(cv, train);
  add_output_options(cv, output);
  std::size_t folds = 5;
  cv->add_option("--k", folds, "Number of folds")->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Label cardinality and density");
  add_data_options(stats, data);
  add_output_options(stats, output);
  std::optional<std::uint64_t> stats_seed;
  stats->add_option("--seed", stats_seed, "Accepted for uniformity; unused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (stream->parsed()) {
      const RunConfig cfg = build_config(data, train);
      const auto result = run_stream(cfg, load_for(cfg));
      if (!stream_model.empty()) save_model(result.model, stream_model);
      write_output(output.out, emit_report(result.report, report_format(output)));
    } else if (train_cmd->parsed()) {
      const RunConfig cfg = build_config(data, train);
      const auto result = run_stream(cfg, load_for(cfg));
      save_model(result.model, model_out);
      std::cout << report_text(result.report);
    } else if (eval->parsed()) {
      const RunConfig cfg = build_config(data, TrainOptions{});
      const auto model = load_model(model_in);
      const auto all = load_for(cfg);
      const DatasetBundle test = eval_all ? all : split_for(cfg, all).second;
      const auto report = evaluate_model(model, test, cfg.dataset_name);
      write_output(output.out, emit_report(report, report_format(output)));
    } else if (cv->parsed()) {
      const RunConfig cfg = build_config(data, train);
      const auto report = run_cv(cfg, load_for(cfg), folds);
      write_output(output.out, emit_report(report, report_format(output)));
    } else if (stats->parsed()) {
      const RunConfig cfg = build_config(data, TrainOptions{});
      const auto all = load_for(cfg);
      const auto s = dataset_stats(all.labelsets, all.m);
      if (report_format(output) == ReportFormat::kJson) {
        nlohmann::ordered_json j;
        j["schema_version"] = "osmlelm.stats/1";
        j["dataset"] = cfg.dataset_name;
        j["n_samples"] = s.n_samples;
        j["n_features"] = all.n_features();
        j["n_labels"] = s.n_labels;
        j["label_cardinality"] = s.label_cardinality;
        j["label_density"] = s.label_density;
        write_output(output.out, j.dump(2) + "\n");
      } else {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%s: samples %zu  features %ld  labels %zu  LC %.4f  LD %.4f\n",
                      cfg.dataset_name.c_str(), s.n_samples,
                      static_cast<long>(all.n_features()), s.n_labels,
                      s.label_cardinality, s.label_density);
        write_output(output.out, buf);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error [" << category_name(e.category()) << "]: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error [unexpected]: " << e.what() << '\n';
    return 10;
  }
  return 0;
}
