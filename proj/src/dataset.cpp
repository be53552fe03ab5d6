/*
 * Copyright 2026 The fairboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "fairboost/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace fairboost {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// One CSV record; comma delimiter, double quotes, "" escapes a quote.
std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool is_missing(const std::string& field) {
  const std::string t = trim(field);
  return t.empty() || t == "?";
}

}  // namespace

void DataSchema::validate() const {
  std::set<std::string> names;
  std::size_t label_count = 0;
  for (const auto& col : columns) {
    if (!names.insert(col.name).second)
      throw ConfigError("schema: duplicate column '" + col.name + "'");
    if (col.kind == ColumnKind::kLabel) ++label_count;
  }
  if (label_count != 1)
    throw ConfigError("schema: exactly one label column required, got " +
                      std::to_string(label_count));
  for (const auto& p : protected_names) {
    if (!names.count(p))
      throw ConfigError("schema: protected column '" + p + "' is not declared");
    for (const auto& col : columns) {
      if (col.name == p && col.kind == ColumnKind::kLabel)
        throw ConfigError("schema: label column cannot be protected");
    }
  }
}

DataSchema DataSchema::from_text(const std::string& text) {
  DataSchema schema;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("schema: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "label") {
      schema.columns.push_back({value, ColumnKind::kLabel});
    } else if (key == "numeric") {
      for (const auto& n : split_list(value))
        schema.columns.push_back({n, ColumnKind::kNumeric});
    } else if (key == "categorical") {
      for (const auto& n : split_list(value))
        schema.columns.push_back({n, ColumnKind::kCategorical});
    } else if (key == "protected") {
      for (const auto& n : split_list(value)) schema.protected_names.push_back(n);
    } else {
      throw ConfigError("schema: unknown key '" + key + "'");
    }
  }
  schema.validate();
  return schema;
}

DataSchema DataSchema::from_file(const std::string& path) {
  return from_text(read_file(path));
}

Dataset load_csv_text(const std::string& csv_text, const DataSchema& schema) {
  schema.validate();
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty file");
  const auto header = parse_csv_line(line);

  // Header must consist exactly of the declared columns; CSV order decides
  // the encoding order.
  std::vector<const ColumnSpec*> specs;
  std::set<std::string> seen;
  for (const auto& name : header) {
    const std::string n = trim(name);
    const ColumnSpec* found = nullptr;
    for (const auto& col : schema.columns) {
      if (col.name == n) found = &col;
    }
    if (!found) throw ConfigError("csv: unknown column '" + n + "'");
    if (!seen.insert(n).second) throw ConfigError("csv: duplicate column '" + n + "'");
    specs.push_back(found);
  }
  for (const auto& col : schema.columns) {
    if (!seen.count(col.name))
      throw ConfigError("csv: column '" + col.name + "' missing from header");
  }

  // Keep complete rows only.
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = parse_csv_line(line);
    if (fields.size() != header.size()) continue;  // short/long row: missing data
    bool missing = false;
    for (const auto& f : fields) missing = missing || is_missing(f);
    if (!missing) rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw DataError("csv: no complete rows after dropping missing data");

  // Categorical levels, sorted for a deterministic encoding.
  std::vector<std::vector<std::string>> levels(specs.size());
  for (std::size_t c = 0; c < specs.size(); ++c) {
    if (specs[c]->kind != ColumnKind::kCategorical) continue;
    std::set<std::string> distinct;
    for (const auto& row : rows) distinct.insert(trim(row[c]));
    levels[c].assign(distinct.begin(), distinct.end());
  }

  // Label mapping: values already in {0,1} keep their meaning; otherwise the
  // two distinct values map to 0/1 in sorted order.
  std::size_t label_col = 0;
  for (std::size_t c = 0; c < specs.size(); ++c)
    if (specs[c]->kind == ColumnKind::kLabel) label_col = c;
  std::set<std::string> label_values;
  for (const auto& row : rows) label_values.insert(trim(row[label_col]));
  std::vector<std::string> lv(label_values.begin(), label_values.end());
  bool zero_one = true;
  for (const auto& v : lv) zero_one = zero_one && (v == "0" || v == "1");
  if (!zero_one && lv.size() != 2)
    throw DataError("csv: label column must be binary, found " +
                    std::to_string(lv.size()) + " distinct values");
  auto label_of = [&](const std::string& raw) -> int {
    const std::string v = trim(raw);
    if (zero_one) return v == "1" ? 1 : 0;
    return v == lv[1] ? 1 : 0;
  };

  // Encoded layout.
  Dataset ds;
  std::vector<std::size_t> first_index(specs.size(), 0);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    first_index[c] = ds.feature_names.size();
    if (specs[c]->kind == ColumnKind::kNumeric) {
      ds.feature_names.push_back(specs[c]->name);
    } else if (specs[c]->kind == ColumnKind::kCategorical) {
      for (const auto& level : levels[c])
        ds.feature_names.push_back(specs[c]->name + "=" + level);
    }
  }
  const std::size_t n = rows.size();
  const std::size_t d = ds.feature_names.size();
  if (d == 0) throw DataError("csv: no feature columns");
  ds.features = Matrix(n, d, 0.0);
  ds.labels.resize(n);

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < specs.size(); ++c) {
      const std::string value = trim(rows[r][c]);
      if (specs[c]->kind == ColumnKind::kLabel) {
        ds.labels[r] = label_of(value);
      } else if (specs[c]->kind == ColumnKind::kNumeric) {
        ds.features(r, first_index[c]) = parse_double(value);
      } else {
        const auto& lvl = levels[c];
        const auto it = std::lower_bound(lvl.begin(), lvl.end(), value);
        const std::size_t k = static_cast<std::size_t>(it - lvl.begin());
        ds.features(r, first_index[c] + k) = 1.0;
      }
    }
  }

  // Standardize numeric columns on the loaded rows.
  for (std::size_t c = 0; c < specs.size(); ++c) {
    if (specs[c]->kind != ColumnKind::kNumeric) continue;
    const std::size_t col = first_index[c];
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += ds.features(r, col);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dlt = ds.features(r, col) - mean;
      var += dlt * dlt;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
      ds.features(r, col) = (ds.features(r, col) - mean) / (sd > 0.0 ? sd : 1.0);
    }
    ds.standardization[col] = {mean, sd};
  }

  for (const auto& p : schema.protected_names) {
    std::vector<std::size_t> idx;
    for (std::size_t c = 0; c < specs.size(); ++c) {
      if (specs[c]->name != p) continue;
      const std::size_t count =
          specs[c]->kind == ColumnKind::kNumeric ? 1 : levels[c].size();
      for (std::size_t k = 0; k < count; ++k) idx.push_back(first_index[c] + k);
    }
    ds.protected_columns[p] = std::move(idx);
  }
  return ds;
}

Dataset load_csv(const std::string& path, const DataSchema& schema) {
  return load_csv_text(read_file(path), schema);
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.standardization = data.standardization;
  out.protected_columns = data.protected_columns;
  out.features = Matrix(rows.size(), data.dim());
  out.labels.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = data.features.row(rows[r]);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels[r] = data.labels[rows[r]];
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("split: test_fraction must be in (0, 1)");
  const std::size_t n = data.n();
  const std::size_t test_target = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n)));
  if (test_target == 0 || test_target >= n)
    throw ConfigError("split: degenerate partition for n=" + std::to_string(n));

  // Stratified by label: per-class counts take the floor, the remainder goes
  // to the classes with the largest fractional part.
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) by_class[data.labels[i] == 1].push_back(i);
  std::size_t want[2];
  double frac[2];
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = test_fraction * static_cast<double>(by_class[c].size());
    want[c] = static_cast<std::size_t>(std::floor(exact));
    frac[c] = exact - std::floor(exact);
    assigned += want[c];
  }
  while (assigned < test_target) {
    const int c = frac[1] > frac[0] ? 1 : 0;
    ++want[c];
    frac[c] = -1.0;
    ++assigned;
  }
  while (assigned > test_target) {
    const int c = want[1] > 0 && frac[1] >= frac[0] ? 1 : 0;
    --want[c];
    --assigned;
  }

  Rng rng(seed);
  std::vector<std::size_t> test_rows, train_rows;
  for (int c = 0; c < 2; ++c) {
    auto order = by_class[c];
    rng.shuffle(order);
    for (std::size_t k = 0; k < order.size(); ++k) {
      (k < want[c] ? test_rows : train_rows).push_back(order[k]);
    }
  }
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  Dataset train = take_rows(data, train_rows);
  Dataset test = take_rows(data, test_rows);

  // Refit standardization on the training rows and push the same transform
  // onto the test rows.
  for (auto& [col, old] : train.standardization) {
    auto destd = [&](Dataset& ds, const ColumnStats& st) {
      for (std::size_t r = 0; r < ds.n(); ++r)
        ds.features(r, col) =
            ds.features(r, col) * (st.stddev > 0.0 ? st.stddev : 1.0) + st.mean;
    };
    destd(train, old);
    destd(test, old);
    double mean = 0.0;
    for (std::size_t r = 0; r < train.n(); ++r) mean += train.features(r, col);
    mean /= static_cast<double>(train.n());
    double var = 0.0;
    for (std::size_t r = 0; r < train.n(); ++r) {
      const double dlt = train.features(r, col) - mean;
      var += dlt * dlt;
    }
    const double sd = std::sqrt(var / static_cast<double>(train.n()));
    const ColumnStats st{mean, sd};
    auto restd = [&](Dataset& ds) {
      for (std::size_t r = 0; r < ds.n(); ++r)
        ds.features(r, col) = (ds.features(r, col) - st.mean) / (sd > 0.0 ? sd : 1.0);
    };
    restd(train);
    restd(test);
    old = st;
    test.standardization[col] = st;
  }
  return {std::move(train), std::move(test)};
}

AugmentedSet augment_support(const Dataset& data) { return AugmentedSet{&data}; }

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (!(cfg.n_majority > 0 && cfg.n_majority < cfg.n_total))
    throw ConfigError("synthetic: require 0 < n_majority < n_total");
  if (!(cfg.shift > 0.0)) throw ConfigError("synthetic: shift must be > 0");

  Rng rng(cfg.seed);
  const std::size_t n = cfg.n_total;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = rng.normal();
    ys[i] = rng.normal();
  }
  double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
  for (std::size_t i = 1; i < n; ++i) {
    xmin = std::min(xmin, xs[i]);
    xmax = std::max(xmax, xs[i]);
    ymin = std::min(ymin, ys[i]);
    ymax = std::max(ymax, ys[i]);
  }
  const double width = xmax - xmin;
  const double slope = width > 0.0 ? (ymax - ymin) / width : 0.0;
  // L1 joins (xmin,ymin)-(xmax,ymax); L2 joins (xmin,ymax)-(xmax,ymin).
  auto above_l1 = [&](double x, double y) { return y > ymin + slope * (x - xmin); };
  auto above_l2 = [&](double x, double y) { return y > ymax - slope * (x - xmin); };

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  Dataset ds;
  ds.feature_names = {"x1", "x2"};
  ds.features = Matrix(n, 2);
  ds.labels.resize(n);
  ds.protected_columns["x1"] = {0};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const bool majority = k < cfg.n_majority;
    const bool above = majority ? above_l1(xs[i], ys[i]) : above_l2(xs[i], ys[i]);
    ds.features(k, 0) = xs[i] + (majority ? -cfg.shift : cfg.shift);
    ds.features(k, 1) = ys[i];
    ds.labels[k] = above ? 1 : 0;
  }
  return ds;
}

std::pair<std::vector<int>, std::vector<int>> class_indicators(
    const std::vector<int>& labels) {
  std::vector<int> y1(labels.size()), y0(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y1[i] = labels[i] == 1 ? 1 : 0;
    y0[i] = 1 - y1[i];
  }
  return {y1, y0};
}

}  // namespace fairboost
