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

// Multi-label dataset ingestion (ARFF in the MULAN/MEKA/KEEL dialects and
// delimited text), file-order train/test splits, seeded shuffles, and min-max
// feature normalization fitted on training data.
//
// Feature encoding: numeric tokens parse as doubles; nominal attributes map to
// the zero-based index of the value in the header declaration, except two-value
// boolean domains ({0,1}, {false,true}, {no,yes}, {f,t}) which map false-like
// to 0 and true-like to 1 regardless of declaration order.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <regex>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osmlelm/multilabel.hpp"
#include "osmlelm/numerics.hpp"

namespace osmlelm {

enum class DataFormat { kArff, kCsv };

inline std::optional<DataFormat> parse_format(std::string_view s) {
  if (s == "arff") return DataFormat::kArff;
  if (s == "csv") return DataFormat::kCsv;
  return std::nullopt;
}

/// How label columns are identified within a file.
struct LabelSpec {
  enum class Kind {
    kAuto,      ///< ARFF only: KEEL @outputs or MEKA "-C n" in @relation
    kTrailing,  ///< last `count` columns
    kLeading,   ///< first `count` columns
    kNames,     ///< explicit column names
    kXml,       ///< MULAN sidecar file listing <label name="..."> entries
  };
  Kind kind = Kind::kAuto;
  std::size_t count = 0;
  std::vector<std::string> names;
  std::string xml_path;

  static LabelSpec trailing(std::size_t n) { return {Kind::kTrailing, n, {}, {}}; }
  static LabelSpec leading(std::size_t n) { return {Kind::kLeading, n, {}, {}}; }
  static LabelSpec from_names(std::vector<std::string> n) {
    return {Kind::kNames, 0, std::move(n), {}};
  }
  static LabelSpec xml(std::string path) { return {Kind::kXml, 0, {}, std::move(path)}; }

  /// Accepts "auto", "trailing:N", "leading:N", "names:a,b,c", "xml:PATH".
  static LabelSpec parse(std::string_view s);

  std::string to_string() const;
};

struct DatasetBundle {
  Matrix x;
  std::vector<LabelSet> labelsets;
  std::size_t m = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;
  std::string source;

  std::size_t size() const noexcept { return labelsets.size(); }
  Index n_features() const noexcept { return x.cols(); }

  friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string unquote(std::string_view s) {
  std::string t = trim(s);
  if (t.size() >= 2 && (t.front() == '\'' || t.front() == '"') &&
      t.back() == t.front()) {
    return t.substr(1, t.size() - 2);
  }
  return t;
}

/// Splits on `delim` outside single or double quotes; fields are trimmed and
/// unquoted.
inline std::vector<std::string> split_fields(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char c : line) {
    if (quote) {
      if (c == quote) quote = 0;
      cur.push_back(c);
    } else if (c == '\'' || c == '"') {
      quote = c;
      cur.push_back(c);
    } else if (c == delim) {
      out.push_back(unquote(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(unquote(cur));
  return out;
}

inline std::optional<double> parse_real(std::string_view tok) {
  std::string t = trim(tok);
  if (t.empty()) return std::nullopt;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// 0 or 1 for boolean-like tokens.
inline std::optional<double> parse_bool(std::string_view tok) {
  const std::string t = lower(trim(tok));
  if (t == "0" || t == "false" || t == "no" || t == "f") return 0.0;
  if (t == "1" || t == "true" || t == "yes" || t == "t") return 1.0;
  return std::nullopt;
}

struct Column {
  std::string name;
  bool nominal = false;
  std::vector<std::string> values;  // declared order for nominal columns
  bool boolean = false;
};

inline bool is_boolean_domain(const std::vector<std::string>& values) {
  if (values.size() != 2) return false;
  auto a = parse_bool(values[0]);
  auto b = parse_bool(values[1]);
  return a && b && *a != *b;
}

inline double encode_token(const Column& col, std::string_view tok,
                           std::size_t line, std::size_t column,
                           const std::string& source) {
  auto fail = [&](const std::string& why) -> ParseError {
    return ParseError(source + ": row " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + why,
                      line, column);
  };
  const std::string t = trim(tok);
  if (t == "?") throw fail("missing value '?' is not supported");
  if (col.nominal) {
    if (col.boolean) {
      if (auto v = parse_bool(t)) return *v;
    }
    for (std::size_t k = 0; k < col.values.size(); ++k) {
      if (col.values[k] == t) return static_cast<double>(k);
    }
    throw fail("value '" + t + "' is not declared for nominal attribute '" +
               col.name + "'");
  }
  if (auto v = parse_real(t)) return *v;
  if (auto v = parse_bool(t)) return *v;
  throw fail("non-numeric token '" + t + "'");
}

inline bool parse_label_token(std::string_view tok, std::size_t line,
                              std::size_t column, const std::string& source) {
  const std::string t = trim(tok);
  if (auto v = parse_bool(t)) return *v == 1.0;
  if (auto v = parse_real(t)) {
    if (*v == 0.0) return false;
    if (*v == 1.0) return true;
  }
  throw ParseError(source + ": row " + std::to_string(line) + ", column " +
                       std::to_string(column) + ": label value '" + t +
                       "' is not 0/1",
                   line, column);
}

inline std::vector<std::string> read_xml_label_names(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  static const std::regex kLabel(R"re(<label\s+name\s*=\s*"([^"]*)")re");
  std::vector<std::string> names;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kLabel);
       it != std::sregex_iterator(); ++it) {
    names.push_back((*it)[1].str());
  }
  if (names.empty()) {
    throw ParseError("label file '" + path + "' declares no <label> entries");
  }
  return names;
}

/// Marks label columns. Returns one flag per column.
inline std::vector<bool> resolve_labels(const std::vector<Column>& cols,
                                        const LabelSpec& spec,
                                        const std::vector<std::string>& keel_outputs,
                                        std::optional<long> meka_c,
                                        const std::string& source) {
  const std::size_t n = cols.size();
  std::vector<bool> is_label(n, false);
  auto by_names = [&](const std::vector<std::string>& names) {
    for (const auto& nm : names) {
      auto it = std::find_if(cols.begin(), cols.end(),
                             [&](const Column& c) { return c.name == nm; });
      if (it == cols.end()) {
        throw ConfigError(source + ": label column '" + nm + "' not found");
      }
      is_label[static_cast<std::size_t>(it - cols.begin())] = true;
    }
  };
  auto edge = [&](std::size_t count, bool trailing) {
    if (count == 0 || count >= n) {
      throw ConfigError(source + ": label count " + std::to_string(count) +
                        " must be in [1, " + std::to_string(n - 1) + "]");
    }
    for (std::size_t k = 0; k < count; ++k) {
      is_label[trailing ? n - 1 - k : k] = true;
    }
  };
  switch (spec.kind) {
    case LabelSpec::Kind::kTrailing: edge(spec.count, true); break;
    case LabelSpec::Kind::kLeading: edge(spec.count, false); break;
    case LabelSpec::Kind::kNames: by_names(spec.names); break;
    case LabelSpec::Kind::kXml: by_names(read_xml_label_names(spec.xml_path)); break;
    case LabelSpec::Kind::kAuto:
      if (!keel_outputs.empty()) {
        by_names(keel_outputs);
      } else if (meka_c && *meka_c != 0) {
        const auto count = static_cast<std::size_t>(std::labs(*meka_c));
        edge(count, *meka_c < 0);
      } else {
        throw ConfigError(source +
                          ": cannot infer label columns; pass a label spec");
      }
      break;
  }
  if (std::count(is_label.begin(), is_label.end(), true) == 0) {
    throw ConfigError(source + ": no label columns selected");
  }
  if (std::count(is_label.begin(), is_label.end(), false) == 0) {
    throw ConfigError(source + ": no feature columns left");
  }
  return is_label;
}

inline std::vector<std::string> split_names(std::string_view s) {
  std::vector<std::string> out;
  for (auto& f : split_fields(s, ',')) {
    if (!f.empty()) out.push_back(f);
  }
  return out;
}

/// Builds a bundle from tokenized rows.
class BundleBuilder {
 public:
  BundleBuilder(std::vector<Column> cols, std::vector<bool> is_label,
                std::string source)
      : cols_(std::move(cols)), is_label_(std::move(is_label)) {
    bundle_.source = std::move(source);
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      if (is_label_[c]) {
        label_cols_.push_back(c);
        bundle_.label_names.push_back(cols_[c].name);
      } else {
        feature_cols_.push_back(c);
        bundle_.feature_names.push_back(cols_[c].name);
      }
    }
    bundle_.m = label_cols_.size();
  }

  void add_row(const std::vector<std::string>& fields, std::size_t line) {
    if (fields.size() != cols_.size()) {
      throw ParseError(bundle_.source + ": row " + std::to_string(line) +
                           ": expected " + std::to_string(cols_.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       line, 0);
    }
    for (std::size_t c : feature_cols_) {
      values_.push_back(
          encode_token(cols_[c], fields[c], line, c + 1, bundle_.source));
    }
    std::vector<LabelSet::Label> members;
    for (std::size_t k = 0; k < label_cols_.size(); ++k) {
      const std::size_t c = label_cols_[k];
      if (parse_label_token(fields[c], line, c + 1, bundle_.source)) {
        members.push_back(static_cast<LabelSet::Label>(k));
      }
    }
    bundle_.labelsets.emplace_back(bundle_.m, std::move(members));
  }

  DatasetBundle finish() && {
    const auto rows = static_cast<Index>(bundle_.labelsets.size());
    const auto d = static_cast<Index>(feature_cols_.size());
    if (rows == 0) throw ParseError(bundle_.source + ": no data rows");
    bundle_.x = Eigen::Map<const Matrix>(values_.data(), rows, d);
    return std::move(bundle_);
  }

 private:
  std::vector<Column> cols_;
  std::vector<bool> is_label_;
  std::vector<std::size_t> label_cols_;
  std::vector<std::size_t> feature_cols_;
  std::vector<double> values_;
  DatasetBundle bundle_;
};

inline DatasetBundle parse_arff(std::istream& in, const LabelSpec& spec,
                                const std::string& source) {
  std::vector<Column> cols;
  std::vector<std::string> keel_outputs;
  std::optional<long> meka_c;
  std::string line;
  std::size_t lineno = 0;
  bool in_data = false;
  std::optional<BundleBuilder> builder;
  static const std::regex kMekaC(R"(-C\s+(-?\d+))");

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    if (!in_data) {
      if (t[0] != '@') {
        throw ParseError(source + ": row " + std::to_string(lineno) +
                             ": unexpected text before @data",
                         lineno, 1);
      }
      const auto sp = t.find_first_of(" \t");
      const std::string kw = lower(t.substr(0, sp));
      const std::string rest = sp == std::string::npos ? "" : trim(t.substr(sp));
      if (kw == "@relation") {
        std::smatch mm;
        if (std::regex_search(rest, mm, kMekaC)) meka_c = std::stol(mm[1].str());
      } else if (kw == "@attribute") {
        Column col;
        std::string type;
        if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
          const auto close = rest.find(rest[0], 1);
          if (close == std::string::npos) {
            throw ParseError(source + ": row " + std::to_string(lineno) +
                                 ": unterminated attribute name",
                             lineno, 1);
          }
          col.name = rest.substr(1, close - 1);
          type = trim(rest.substr(close + 1));
        } else {
          const auto e = rest.find_first_of(" \t{");
          col.name = rest.substr(0, e);
          type = e == std::string::npos ? "" : trim(rest.substr(e));
        }
        if (!type.empty() && type[0] == '{') {
          const auto close = type.rfind('}');
          if (close == std::string::npos) {
            throw ParseError(source + ": row " + std::to_string(lineno) +
                                 ": unterminated nominal domain",
                             lineno, 1);
          }
          col.nominal = true;
          col.values = split_fields(type.substr(1, close - 1), ',');
          col.boolean = is_boolean_domain(col.values);
        } else {
          const std::string lt = lower(type);
          if (!(lt.rfind("numeric", 0) == 0 || lt.rfind("real", 0) == 0 ||
                lt.rfind("integer", 0) == 0)) {
            throw ParseError(source + ": row " + std::to_string(lineno) +
                                 ": unsupported attribute type '" + type + "'",
                             lineno, 1);
          }
        }
        cols.push_back(std::move(col));
      } else if (kw == "@outputs" || kw == "@output") {
        keel_outputs = split_names(rest);
      } else if (kw == "@inputs" || kw == "@input") {
        // implied by @outputs
      } else if (kw == "@data") {
        if (cols.empty()) throw ParseError(source + ": no attributes declared");
        builder.emplace(cols, resolve_labels(cols, spec, keel_outputs, meka_c, source),
                        source);
        in_data = true;
      } else {
        throw ParseError(source + ": row " + std::to_string(lineno) +
                             ": unknown header keyword '" + kw + "'",
                         lineno, 1);
      }
      continue;
    }
    if (t[0] == '{') {
      throw ParseError(source + ": row " + std::to_string(lineno) +
                           ": sparse ARFF rows are not supported",
                       lineno, 1);
    }
    builder->add_row(split_fields(t, ','), lineno);
  }
  if (!builder) throw ParseError(source + ": missing @data section");
  return std::move(*builder).finish();
}

inline DatasetBundle parse_csv(std::istream& in, const LabelSpec& spec,
                               const std::string& source, char delim) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<BundleBuilder> builder;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, delim);
    if (!builder) {
      std::vector<Column> cols;
      for (auto& f : fields) cols.push_back(Column{f, false, {}, false});
      if (spec.kind == LabelSpec::Kind::kAuto) {
        throw ConfigError(source + ": delimited files need an explicit label spec");
      }
      builder.emplace(cols, resolve_labels(cols, spec, {}, std::nullopt, source),
                      source);
      continue;
    }
    builder->add_row(fields, lineno);
  }
  if (!builder) throw ParseError(source + ": empty file");
  return std::move(*builder).finish();
}

}  // namespace detail

inline LabelSpec LabelSpec::parse(std::string_view s) {
  const std::string str(s);
  if (str == "auto") return LabelSpec{};
  const auto colon = str.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("label spec '" + str + "' must be auto or KIND:VALUE");
  }
  const std::string kind = str.substr(0, colon);
  const std::string value = str.substr(colon + 1);
  auto count = [&]() -> std::size_t {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || ptr != value.data() + value.size() || n == 0) {
      throw ConfigError("label spec '" + str + "': expected a positive count");
    }
    return n;
  };
  if (kind == "trailing") return trailing(count());
  if (kind == "leading") return leading(count());
  if (kind == "names") return from_names(detail::split_names(value));
  if (kind == "xml") return xml(value);
  throw ConfigError("label spec '" + str + "': unknown kind '" + kind + "'");
}

inline std::string LabelSpec::to_string() const {
  switch (kind) {
    case Kind::kAuto: return "auto";
    case Kind::kTrailing: return "trailing:" + std::to_string(count);
    case Kind::kLeading: return "leading:" + std::to_string(count);
    case Kind::kXml: return "xml:" + xml_path;
    case Kind::kNames: {
      std::string out = "names:";
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ',';
        out += names[i];
      }
      return out;
    }
  }
  return "auto";
}

inline DatasetBundle parse_dataset(std::istream& in, DataFormat format,
                                   const LabelSpec& spec,
                                   const std::string& source = "<stream>",
                                   char delim = ',') {
  return format == DataFormat::kArff ? detail::parse_arff(in, spec, source)
                                     : detail::parse_csv(in, spec, source, delim);
}

inline DatasetBundle load_dataset(const std::string& path, DataFormat format,
                                  const LabelSpec& spec, char delim = ',') {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  return parse_dataset(in, format, spec, path, delim);
}

/// Rows in the given order.
inline DatasetBundle select_rows(const DatasetBundle& b,
                                 std::span<const std::size_t> rows) {
  DatasetBundle out;
  out.m = b.m;
  out.feature_names = b.feature_names;
  out.label_names = b.label_names;
  out.source = b.source;
  out.x.resize(static_cast<Index>(rows.size()), b.x.cols());
  out.labelsets.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= b.size()) throw DimensionError("select_rows: row out of range");
    out.x.row(static_cast<Index>(i)) = b.x.row(static_cast<Index>(rows[i]));
    out.labelsets.push_back(b.labelsets[rows[i]]);
  }
  return out;
}

/// First n_train rows (file order) train, the remainder test.
inline std::pair<DatasetBundle, DatasetBundle> split(const DatasetBundle& b,
                                                     std::size_t n_train) {
  if (n_train == 0 || n_train >= b.size()) {
    throw ConfigError("split: n_train = " + std::to_string(n_train) +
                      " must be in [1, " + std::to_string(b.size() - 1) + "]");
  }
  std::vector<std::size_t> head(n_train);
  std::vector<std::size_t> tail(b.size() - n_train);
  for (std::size_t i = 0; i < head.size(); ++i) head[i] = i;
  for (std::size_t i = 0; i < tail.size(); ++i) tail[i] = n_train + i;
  return {select_rows(b, head), select_rows(b, tail)};
}

/// Row-wise concatenation; inverse of split.
inline DatasetBundle concat(const DatasetBundle& a, const DatasetBundle& b) {
  if (a.m != b.m || a.x.cols() != b.x.cols()) {
    throw DimensionError("concat: bundles have different shapes");
  }
  DatasetBundle out = a;
  out.x.conservativeResize(a.x.rows() + b.x.rows(), Eigen::NoChange);
  out.x.bottomRows(b.x.rows()) = b.x;
  out.labelsets.insert(out.labelsets.end(), b.labelsets.begin(), b.labelsets.end());
  return out;
}

/// Fisher-Yates permutation of {0..n-1} driven by SeededRng.
inline std::vector<std::size_t> seeded_permutation(std::size_t n,
                                                   std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  SeededRng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

inline DatasetBundle shuffled(const DatasetBundle& b, std::uint64_t seed) {
  const auto p = seeded_permutation(b.size(), seed);
  return select_rows(b, p);
}

/// Per-feature min/max fitted on a training split.
struct NormStats {
  Vector min;
  Vector max;
  bool fitted = false;

  friend bool operator==(const NormStats&, const NormStats&) = default;
};

inline NormStats normalize_fit(const DatasetBundle& train) {
  if (train.size() == 0) throw DimensionError("normalize_fit: empty bundle");
  NormStats s;
  s.min = train.x.colwise().minCoeff().transpose();
  s.max = train.x.colwise().maxCoeff().transpose();
  s.fitted = true;
  return s;
}

/// x' = (x - min) / (max - min); zero-range features map to 0. No clamping.
inline Matrix normalize_apply(const NormStats& stats, const Matrix& x) {
  if (!stats.fitted) {
    throw ConfigError("normalize_apply: statistics have not been fitted");
  }
  if (x.cols() != stats.min.size()) {
    throw DimensionError("normalize_apply: data has " + std::to_string(x.cols()) +
                         " features, statistics have " +
                         std::to_string(stats.min.size()));
  }
  Matrix out(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double lo = stats.min(j);
    const double range = stats.max(j) - lo;
    for (Index i = 0; i < x.rows(); ++i) {
      out(i, j) = range > 0.0 ? (x(i, j) - lo) / range : 0.0;
    }
  }
  return out;
}

inline DatasetBundle normalize_apply(const NormStats& stats, DatasetBundle b) {
  b.x = normalize_apply(stats, b.x);
  return b;
}

}  // namespace osmlelm
