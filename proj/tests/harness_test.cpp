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

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "osmlelm/harness/config.hpp"
#include "osmlelm/harness/model_io.hpp"
#include "osmlelm/harness/pipeline.hpp"
#include "osmlelm/harness/report.hpp"

namespace osmlelm {
namespace {

using testing::max_abs;

const std::string kGolden = OSMLELM_TEST_GOLDEN_DIR;
const std::string kPresets = OSMLELM_TEST_PRESETS;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() /
          ("osmlelm_" + std::to_string(::getpid()) + "_" + name))
      .string();
}

RunConfig small_config() {
  RunConfig cfg;
  cfg.dataset_name = "separable";
  cfg.n_hidden = 40;
  cfg.n_init = 60;
  cfg.chunk_size = 5;
  cfg.seed = 3;
  return cfg;
}

nlohmann::ordered_json without_timing(nlohmann::ordered_json j) {
  j.erase("timing");
  return j;
}

TEST(EpochCount, CeilingOfRemainder) {
  EXPECT_EQ(epoch_count(1500, 0, 30), 50u);
  EXPECT_EQ(epoch_count(1600, 175, 28), 51u);
  EXPECT_EQ(epoch_count(100, 100, 7), 0u);
  EXPECT_EQ(epoch_count(101, 100, 7), 1u);
  EXPECT_THROW(epoch_count(10, 0, 0), ConfigError);
}

TEST(RunStream, EpochsMatchChunkAccounting) {
  const auto all = testing::separable_stream(21, 400, 3, 2);
  for (std::size_t chunk : {1u, 4u, 30u}) {
    auto cfg = small_config();
    cfg.chunk_size = chunk;
    cfg.n_train = 300;
    const auto r = run_stream(cfg, all).report;
    EXPECT_EQ(r.timing.n_epochs, epoch_count(300, 60, chunk)) << chunk;
    EXPECT_EQ(r.n_train, 300u);
    EXPECT_EQ(r.n_test, 100u);
  }
}

TEST(RunStream, SeparableStreamIsPerfectOnHeldOut) {
  const auto all = testing::separable_stream(22, 600, 4, 3);
  auto cfg = small_config();
  cfg.n_train = 450;
  const auto r = run_stream(cfg, all).report;
  EXPECT_EQ(r.metrics.hamming_loss, 0.0);
  EXPECT_EQ(r.metrics.f1, 1.0);
}

TEST(RunStream, NInitRaisedToHiddenWithoutRidge) {
  auto cfg = small_config();
  cfg.n_init = 10;
  EXPECT_EQ(cfg.effective_n_init(), 40u);
  cfg.ridge = 1e-3;
  EXPECT_EQ(cfg.effective_n_init(), 10u);
  const auto all = testing::separable_stream(23, 200, 2, 1);
  cfg.n_train = 150;
  EXPECT_EQ(run_stream(cfg, all).report.n_init_used, 10u);
}

TEST(RunStream, TrainingSplitTooSmall) {
  auto cfg = small_config();
  cfg.n_train = 50;
  EXPECT_THROW(run_stream(cfg, testing::separable_stream(24, 100, 2, 1)), ConfigError);
}

TEST(RunStream, DeterministicApartFromTiming) {
  const auto all = testing::noisy_stream(25, 300, 6, 4);
  auto cfg = small_config();
  cfg.shuffle_seed = 8;
  const auto a = report_json(run_stream(cfg, all).report);
  const auto b = report_json(run_stream(cfg, all).report);
  EXPECT_EQ(without_timing(a).dump(), without_timing(b).dump());
}

TEST(RunStream, TimingFieldsAreConsistent) {
  const auto all = testing::noisy_stream(26, 500, 6, 4);
  auto cfg = small_config();
  const auto t = run_stream(cfg, all).report.timing;
  EXPECT_GT(t.train_s, 0.0);
  EXPECT_GT(t.test_s, 0.0);
  EXPECT_LE(t.sequential_s, t.train_s);
  EXPECT_DOUBLE_EQ(t.avg_epoch_s * static_cast<double>(t.n_epochs), t.sequential_s);
}

TEST(ThresholdModes, ZeroCalibratedAndRecalibrate) {
  const auto all = testing::noisy_stream(27, 400, 6, 4);
  auto cfg = small_config();
  cfg.threshold_mode = ThresholdMode::kZero;
  EXPECT_EQ(run_stream(cfg, all).report.threshold, 0.0);

  cfg.threshold_mode = ThresholdMode::kCalibrated;
  const auto calibrated = run_stream(cfg, all);
  EXPECT_EQ(calibrated.report.threshold,
            threshold_value(calibrated.model.classifier.calibration()));

  cfg.threshold_mode = ThresholdMode::kRecalibrate;
  const auto re = run_stream(cfg, all);
  const auto [train, test] = split_for(cfg, all);
  const Matrix x = normalize_apply(normalize_fit(train), train.x);
  const auto fresh =
      calibrate_rows(ThresholdCalib{}, re.model.classifier.scores(x), train.labelsets);
  EXPECT_EQ(re.report.threshold, threshold_value(fresh));
}

TEST(Config, ValidationListsEveryProblem) {
  RunConfig cfg;
  cfg.n_hidden = 0;
  cfg.chunk_size = 0;
  cfg.ridge = -1.0;
  cfg.weight_range = {1.0, 1.0};
  EXPECT_EQ(cfg.problems().size(), 4u);
  try {
    cfg.validate();
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* key : {"n_hidden", "chunk_size", "ridge", "weight range"}) {
      EXPECT_NE(msg.find(key), std::string::npos) << key;
    }
  }
  EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(Config, PresetsReproduceEpochCounts) {
  const std::pair<const char*, std::size_t> want[] = {
      {"yeast", 51}, {"scene", 48}, {"corel5k", 93}, {"enron", 48}, {"medical", 37}};
  for (const auto& [name, epochs] : want) {
    const auto cfg = preset_config(kPresets, name, "/data");
    EXPECT_EQ(epoch_count(cfg.n_train, cfg.effective_n_init(), cfg.chunk_size), epochs)
        << name;
    EXPECT_EQ(cfg.dataset_path, std::string("/data/") + name + ".arff");
    EXPECT_NO_THROW(cfg.validate());
  }
  EXPECT_THROW(preset_config(kPresets, "nope"), ConfigError);
}

TEST(CrossValidation, FoldsPartitionTheRows) {
  const auto folds = cv_folds(10, 5, 4);
  std::multiset<std::size_t> seen;
  for (const auto& f : folds) {
    EXPECT_EQ(f.size(), 2u);
    seen.insert(f.begin(), f.end());
  }
  EXPECT_EQ(seen.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(seen.count(i), 1u);
  EXPECT_EQ(folds, cv_folds(10, 5, 4));
  const auto uneven = cv_folds(11, 3, 4);
  EXPECT_EQ(uneven[0].size(), 4u);
  EXPECT_EQ(uneven[1].size(), 4u);
  EXPECT_EQ(uneven[2].size(), 3u);
}

TEST(CrossValidation, RejectsBadK) {
  EXPECT_THROW(cv_folds(4, 5, 1), ConfigError);
  EXPECT_THROW(cv_folds(4, 1, 1), ConfigError);
}

TEST(CrossValidation, TinyRunAndDeterminism) {
  const auto all = testing::separable_stream(28, 10, 2, 1);
  RunConfig cfg;
  cfg.n_hidden = 3;
  cfg.ridge = 1e-2;
  cfg.n_init = 4;
  cfg.threshold_mode = ThresholdMode::kZero;
  const auto a = run_cv(cfg, all, 5);
  const auto b = run_cv(cfg, all, 5);
  ASSERT_EQ(a.folds.size(), 5u);
  for (const auto& f : a.folds) EXPECT_EQ(f.n_samples, 2u);
  EXPECT_EQ(cv_json(a).dump(), cv_json(b).dump());
}

TEST(CrossValidation, SummaryUsesSampleStd) {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(5.0 / 3.0));
}

TEST(ModelIo, RoundTripPredictsIdentically) {
  const auto all = testing::noisy_stream(29, 300, 5, 3);
  const auto res = run_stream(small_config(), all);
  const auto path = temp_path("model.json");
  save_model(res.model, path);
  const auto loaded = load_model(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.classifier.state().beta, res.model.classifier.state().beta);
  EXPECT_EQ(loaded.classifier.state().m, res.model.classifier.state().m);
  EXPECT_EQ(loaded.classifier.params(), res.model.classifier.params());
  EXPECT_EQ(loaded.threshold, res.model.threshold);
  EXPECT_EQ(loaded.classifier.calibration(), res.model.classifier.calibration());
  EXPECT_EQ(loaded.predict(all.x), res.model.predict(all.x));
  EXPECT_EQ(model_to_json(loaded).dump(), model_to_json(res.model).dump());
}

TEST(ModelIo, ResumeMatchesUninterruptedStream) {
  const auto all = testing::noisy_stream(30, 400, 5, 3);
  auto cfg = small_config();
  cfg.normalize = false;
  cfg.n_train = 200;
  const auto [head, rest] = split(all, 200);
  auto res = run_stream(cfg, head, rest);

  const auto path = temp_path("resume.json");
  save_model(res.model, path);
  auto resumed = load_model(path);
  std::filesystem::remove(path);

  OnlineClassifier& live = res.model.classifier;
  for (std::size_t start = 0; start < rest.size(); start += 7) {
    const std::size_t c = std::min<std::size_t>(7, rest.size() - start);
    const Matrix xc = rest.x.middleRows(static_cast<Index>(start), static_cast<Index>(c));
    const auto labels = std::span<const LabelSet>(rest.labelsets).subspan(start, c);
    live.partial_fit(xc, labels);
    resumed.classifier.partial_fit(xc, labels);
  }
  EXPECT_LE(max_abs(live.state().beta - resumed.classifier.state().beta), 1e-12);
  EXPECT_LE(max_abs(live.state().m - resumed.classifier.state().m), 1e-12);
  EXPECT_EQ(live.calibration(), resumed.classifier.calibration());
}

TEST(ModelIo, RejectsWrongVersionBeforeChecksum) {
  const auto res = run_stream(small_config(), testing::noisy_stream(31, 200, 4, 2));
  auto j = model_to_json(res.model);
  j["schema_version"] = "osmlelm.model/999";
  try {
    model_from_json(j);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("schema_version"), std::string::npos);
  }
}

TEST(ModelIo, RejectsTamperedBody) {
  const auto res = run_stream(small_config(), testing::noisy_stream(32, 200, 4, 2));
  auto j = model_to_json(res.model);
  j["samples_seen"] = 1;
  try {
    model_from_json(j);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos);
  }
}

TEST(ModelIo, RejectsGarbageAndMissingFiles) {
  const auto path = temp_path("garbage.json");
  std::ofstream(path) << "{not json";
  EXPECT_THROW(load_model(path), FormatError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_model("/nonexistent/model.json"), IoError);
}

TEST(ModelIo, Base64AndPackedDoublesRoundTrip) {
  const std::vector<unsigned char> bytes{0, 1, 2, 250, 255};
  EXPECT_EQ(detail::base64_decode(detail::base64_encode(bytes)), bytes);
  const double vals[] = {0.1, -0.0, 1e-308, 3.5};
  const auto back = detail::unpack_doubles(detail::pack_doubles(vals, 4));
  ASSERT_EQ(back.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(std::memcmp(&back[i], &vals[i], 8), 0);
  EXPECT_EQ(detail::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

RunReport fixed_report() {
  RunReport r;
  r.dataset = "golden";
  r.config.dataset_path = "data/golden.arff";
  r.config.label_spec = LabelSpec::trailing(4);
  r.config.n_hidden = 50;
  r.config.seed = 7;
  r.config.n_init = 60;
  r.config.chunk_size = 10;
  r.n_train = 200;
  r.n_test = 100;
  r.n_init_used = 60;
  r.metrics = {0.125, 0.5, 0.75, 0.625, 0.5625, 100, 4};
  r.timing = {1.5, 0.25, 1.25, 14, 0.125};
  r.threshold = -0.0625;
  return r;
}

TEST(Report, JsonMatchesGoldenFile) {
  std::ifstream in(kGolden + "/report.json");
  ASSERT_TRUE(in) << "missing golden file";
  std::stringstream want;
  want << in.rdbuf();
  EXPECT_EQ(emit_report(fixed_report(), ReportFormat::kJson), want.str());
}

TEST(Report, JsonParsesBackWithAllFields) {
  const auto j = nlohmann::json::parse(emit_report(fixed_report(), ReportFormat::kJson));
  EXPECT_EQ(j.at("schema_version"), "osmlelm.report/1");
  for (const char* k : {"hamming_loss", "accuracy", "precision", "recall", "f1"}) {
    EXPECT_TRUE(j.at("metrics").contains(k)) << k;
  }
  for (const char* k : {"train_s", "test_s", "n_epochs", "avg_epoch_s"}) {
    EXPECT_TRUE(j.at("timing").contains(k)) << k;
  }
  EXPECT_EQ(j.at("config").at("seed"), 7);
  EXPECT_EQ(j.at("config").at("generator"), "mt19937_64/u53");
}

TEST(Report, TextShowsMetricsAndTiming) {
  const auto text = emit_report(fixed_report(), ReportFormat::kText);
  for (const char* k : {"Hamming Loss", "Accuracy", "Precision", "Recall", "F1 measure",
                        "train_s", "test_s", "n_epochs", "avg_epoch_s", "0.1250"}) {
    EXPECT_NE(text.find(k), std::string::npos) << k;
  }
}

}  // namespace
}  // namespace osmlelm
