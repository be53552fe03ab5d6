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
#ifndef FAIRBOOST_DATASET_HPP_
#define FAIRBOOST_DATASET_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairboost/common.hpp"

namespace fairboost {

enum class ColumnKind { kNumeric, kCategorical, kLabel };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
};

/// Declares how raw CSV columns are interpreted. Exactly one label column;
/// protected names must refer to declared columns (numeric or categorical).
struct DataSchema {
  std::vector<ColumnSpec> columns;
  std::vector<std::string> protected_names;

  void validate() const;

  /// Key-value schema file: `label=`, `numeric=a,b`, `categorical=c,d`,
  /// `protected=e,f`. Column order follows the declaration order
  /// numeric-then-categorical unless the CSV header decides (load_csv uses
  /// header order).
  static DataSchema from_file(const std::string& path);
  static DataSchema from_text(const std::string& text);
};

/// Per-numeric-column standardization statistics, fitted on the rows the
/// dataset was built from.
struct ColumnStats {
  double mean = 0.0;
  double stddev = 1.0;
};

/// Encoded tabular binary-classification data. Features are dense,
/// categoricals one-hot encoded (all levels kept), numerics standardized.
struct Dataset {
  Matrix features;  // n x d
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  /// encoded column index -> stats, only for standardized numeric columns
  std::map<std::size_t, ColumnStats> standardization;
  /// protected attribute name -> encoded column indices
  std::map<std::string, std::vector<std::size_t>> protected_columns;

  std::size_t n() const { return features.rows; }
  std::size_t dim() const { return features.cols; }
};

/// The support-augmented set: every row duplicated with both labels.
/// Index layout matches the concatenated weight vector convention:
/// a in [0, n) is (row a, forced label 0), a in [n, 2n) is (row a-n, label 1).
struct AugmentedSet {
  const Dataset* base = nullptr;
  std::size_t size() const { return 2 * base->n(); }
  std::pair<std::size_t, int> decode(std::size_t a) const {
    const std::size_t n = base->n();
    return a < n ? std::pair{a, 0} : std::pair{a - n, 1};
  }
  std::size_t encode(std::size_t i, int k) const {
    return static_cast<std::size_t>(k) * base->n() + i;
  }
};

struct SyntheticConfig {
  std::size_t n_total = 150;
  std::size_t n_majority = 125;
  double shift = 2.0;
  std::uint64_t seed = 0;
};

Dataset load_csv(const std::string& path, const DataSchema& schema);
Dataset load_csv_text(const std::string& csv_text, const DataSchema& schema);

/// Stratified-by-label row partition; the test part is re-standardized with
/// the train part's statistics. Deterministic in `seed`.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed);

AugmentedSet augment_support(const Dataset& data);

/// Two overlapping 2-D clusters labeled by opposite diagonals of their
/// common bounding rectangle, then shifted apart along x1 (the protected
/// coordinate). Columns: x1, x2; protected: x1.
Dataset generate_synthetic(const SyntheticConfig& cfg);

/// Class indicator vectors over the base labels: y1[i] = labels[i],
/// y0 = 1 - y1.
std::pair<std::vector<int>, std::vector<int>> class_indicators(
    const std::vector<int>& labels);

}  // namespace fairboost

#endif  // FAIRBOOST_DATASET_HPP_
