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

// Model persistence. A model file is a JSON object whose matrices are stored
// as base64 of little-endian IEEE-754 doubles in row-major order, so a reload
// is bit-exact. The "checksum" field is "sha256:<hex>" over the compact dump
// of the document without that field.
//
// Requires linking OpenSSL::Crypto.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "osmlelm/harness/pipeline.hpp"

namespace osmlelm {

inline constexpr std::string_view kModelSchema = "osmlelm.model/1";

namespace detail {

inline std::string base64_encode(const std::vector<unsigned char>& bytes) {
  if (bytes.empty()) return {};
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

inline std::vector<unsigned char> base64_decode(std::string_view text) {
  if (text.empty()) return {};
  if (text.size() % 4 != 0) throw FormatError("model file: bad base64 length");
  std::vector<unsigned char> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw FormatError("model file: invalid base64 payload");
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw FormatError("sha256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

inline std::string pack_doubles(const double* data, std::size_t n) {
  std::vector<unsigned char> bytes(n * 8);
  for (std::size_t i = 0; i < n; ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(data[i]);
    for (int b = 0; b < 8; ++b) {
      bytes[i * 8 + static_cast<std::size_t>(b)] =
          static_cast<unsigned char>(bits >> (8 * b));
    }
  }
  return base64_encode(bytes);
}

inline std::vector<double> unpack_doubles(std::string_view text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % 8 != 0) throw FormatError("model file: truncated array");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(bytes[i * 8 + static_cast<std::size_t>(b)])
              << (8 * b);
    }
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

inline nlohmann::ordered_json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", pack_doubles(m.data(), static_cast<std::size_t>(m.size()))}};
}

inline Matrix matrix_from_json(const nlohmann::ordered_json& j,
                               std::string_view what) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto values = unpack_doubles(j.at("data").get<std::string>());
  if (rows < 0 || cols < 0 ||
      values.size() != static_cast<std::size_t>(rows * cols)) {
    throw FormatError("model file: array '" + std::string(what) +
                      "' does not match its declared shape");
  }
  return Eigen::Map<const Matrix>(values.data(), rows, cols);
}

inline nlohmann::ordered_json vector_json(const Vector& v) {
  return pack_doubles(v.data(), static_cast<std::size_t>(v.size()));
}

inline Vector vector_from_json(const nlohmann::ordered_json& j) {
  const auto values = unpack_doubles(j.get<std::string>());
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::optional<double> optional_from_json(const nlohmann::ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json model_to_json(const TrainedModel& model) {
  const auto& clf = model.classifier;
  const auto& params = clf.params();
  const auto& state = clf.state();
  const auto& calib = clf.calibration();
  nlohmann::ordered_json j;
  j["schema_version"] = kModelSchema;
  j["generator"] = SeededRng::kAlgorithm;
  j["seed"] = model.seed;
  j["weight_range"] = {model.weight_range.lo, model.weight_range.hi};
  j["activation"] = activation_name(params.activation());
  j["n_features"] = params.n_features();
  j["n_hidden"] = params.n_hidden();
  j["n_labels"] = clf.n_labels();
  j["W"] = detail::matrix_json(params.weights());
  j["b"] = detail::vector_json(params.bias());
  j["beta"] = detail::matrix_json(state.beta);
  j["M"] = detail::matrix_json(state.m);
  j["samples_seen"] = state.samples_seen;
  j["ridge"] = state.ridge_used;
  j["threshold"] = detail::pack_doubles(&model.threshold, 1);
  j["threshold_mode"] = threshold_mode_name(model.threshold_mode);
  j["min_one"] = model.min_one;
  j["calibration"] = {{"min_pos", detail::optional_json(calib.min_pos)},
                      {"max_neg", detail::optional_json(calib.max_neg)},
                      {"observations", calib.observations}};
  if (model.norm) {
    j["normalization"] = {{"min", detail::vector_json(model.norm->min)},
                          {"max", detail::vector_json(model.norm->max)}};
  } else {
    j["normalization"] = nullptr;
  }
  j["checksum"] = "sha256:" + detail::sha256_hex(j.dump());
  return j;
}

inline TrainedModel model_from_json(nlohmann::ordered_json j) {
  try {
    if (!j.is_object() || !j.contains("schema_version")) {
      throw FormatError("model file: missing schema_version");
    }
    const auto version = j.at("schema_version").get<std::string>();
    if (version != kModelSchema) {
      throw FormatError("model file: unsupported schema_version '" + version +
                        "' (expected '" + std::string(kModelSchema) + "')");
    }
    if (!j.contains("checksum")) throw FormatError("model file: missing checksum");
    const auto stored = j.at("checksum").get<std::string>();
    j.erase("checksum");
    if (stored != "sha256:" + detail::sha256_hex(j.dump())) {
      throw FormatError("model file: checksum mismatch (file is corrupted)");
    }
    if (j.at("generator").get<std::string>() != SeededRng::kAlgorithm) {
      throw FormatError("model file: unknown generator '" +
                        j.at("generator").get<std::string>() + "'");
    }
    const auto act = parse_activation(j.at("activation").get<std::string>());
    if (!act) throw FormatError("model file: unknown activation");
    ElmParams params(detail::matrix_from_json(j.at("W"), "W"),
                     detail::vector_from_json(j.at("b")), *act);
    OselmState state;
    state.beta = detail::matrix_from_json(j.at("beta"), "beta");
    state.m = detail::matrix_from_json(j.at("M"), "M");
    state.samples_seen = j.at("samples_seen").get<std::uint64_t>();
    state.ridge_used = j.at("ridge").get<double>();
    if (state.beta.rows() != params.n_hidden() || state.m.rows() != params.n_hidden() ||
        state.m.cols() != params.n_hidden() ||
        state.beta.cols() != j.at("n_labels").get<Index>()) {
      throw FormatError("model file: inconsistent matrix shapes");
    }
    ThresholdCalib calib;
    const auto& c = j.at("calibration");
    calib.min_pos = detail::optional_from_json(c.at("min_pos"));
    calib.max_neg = detail::optional_from_json(c.at("max_neg"));
    calib.observations = c.at("observations").get<std::uint64_t>();

    const auto thr = detail::unpack_doubles(j.at("threshold").get<std::string>());
    if (thr.size() != 1) throw FormatError("model file: bad threshold");
    const auto mode = parse_threshold_mode(j.at("threshold_mode").get<std::string>());
    if (!mode) throw FormatError("model file: unknown threshold_mode");
    std::optional<NormStats> norm;
    if (!j.at("normalization").is_null()) {
      NormStats s;
      s.min = detail::vector_from_json(j.at("normalization").at("min"));
      s.max = detail::vector_from_json(j.at("normalization").at("max"));
      s.fitted = true;
      norm = std::move(s);
    }
    const auto range = j.at("weight_range");
    return TrainedModel{
        OnlineClassifier(std::move(params), std::move(state), std::move(calib)),
        thr[0],
        *mode,
        j.at("min_one").get<bool>(),
        std::move(norm),
        j.at("seed").get<std::uint64_t>(),
        WeightRange{range.at(0).get<double>(), range.at(1).get<double>()}};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model file: malformed document: ") + e.what());
  }
}

inline void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file '" + path + "'");
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw IoError("failed writing model file '" + path + "'");
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model file '" + path + "' is corrupted: " + e.what());
  }
  return model_from_json(std::move(j));
}

}  // namespace osmlelm
