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
#include "fairboost/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fairboost {

namespace {

// Protected attributes by bookkeeping, any other attribute (e.g. a proxy
// audited for consistency) by its encoded feature names: a plain column
// "attr" or a one-hot block "attr=level".
std::vector<std::size_t> attribute_columns(const Dataset& data,
                                           const std::string& name) {
  const auto it = data.protected_columns.find(name);
  if (it != data.protected_columns.end() && !it->second.empty()) return it->second;
  std::vector<std::size_t> cols;
  const std::string prefix = name + "=";
  for (std::size_t c = 0; c < data.feature_names.size(); ++c) {
    if (data.feature_names[c] == name || data.feature_names[c].rfind(prefix, 0) == 0)
      cols.push_back(c);
  }
  if (cols.empty()) throw DataError("unknown attribute '" + name + "'");
  return cols;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

// Encoded feature-name suffix after "attr=", or empty for plain columns.
std::string level_of(const Dataset& data, std::size_t col, const std::string& attr) {
  const std::string& full = data.feature_names[col];
  const std::string prefix = attr + "=";
  if (full.rfind(prefix, 0) == 0) return full.substr(prefix.size());
  return "";
}

double standardize_raw(const Dataset& data, std::size_t col, double raw) {
  const auto it = data.standardization.find(col);
  if (it == data.standardization.end()) return raw;
  const double sd = it->second.stddev;
  return (raw - it->second.mean) / (sd > 0.0 ? sd : 1.0);
}

}  // namespace

std::vector<int> predict_labels(const Ensemble& model, const Dataset& data) {
  std::vector<int> preds(data.n());
  for (std::size_t i = 0; i < data.n(); ++i)
    preds[i] = model.predict_label(data.features.row(i));
  return preds;
}

double balanced_accuracy(const std::vector<int>& predictions,
                         const std::vector<int>& labels) {
  if (predictions.size() != labels.size() || labels.empty())
    throw DataError("balanced_accuracy: size mismatch or empty input");
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      (predictions[i] == 1 ? tp : fn) += 1;
    } else {
      (predictions[i] == 0 ? tn : fp) += 1;
    }
  }
  if (tp + fn == 0 || tn + fp == 0)
    throw DataError("balanced_accuracy: both classes must be present");
  const double tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double tnr = static_cast<double>(tn) / static_cast<double>(tn + fp);
  return 0.5 * (tpr + tnr);
}

GapReport group_gaps(const std::vector<int>& predictions,
                     const std::vector<int>& labels, const std::vector<int>& group,
                     const std::string& attribute) {
  const std::size_t n = labels.size();
  if (predictions.size() != n || group.size() != n)
    throw DataError("group_gaps: size mismatch");
  std::size_t group_count[2] = {0, 0};
  // hits[g][y] / totals[g][y]: correct predictions of outcome y in group g.
  std::size_t hits[2][2] = {{0, 0}, {0, 0}};
  std::size_t totals[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < n; ++i) {
    const int g = group[i] == 1 ? 1 : 0;
    const int y = labels[i] == 1 ? 1 : 0;
    ++group_count[g];
    ++totals[g][y];
    if (predictions[i] == labels[i]) ++hits[g][y];
  }
  if (group_count[0] == 0 || group_count[1] == 0)
    throw DataError("group_gaps: empty group");

  GapReport report;
  report.attribute = attribute;
  double sq_sum = 0.0;
  std::size_t defined = 0;
  for (int y = 0; y < 2; ++y) {
    const bool ok = totals[0][y] > 0 && totals[1][y] > 0;
    double gap = 0.0;
    if (ok) {
      const double r0 =
          static_cast<double>(hits[0][y]) / static_cast<double>(totals[0][y]);
      const double r1 =
          static_cast<double>(hits[1][y]) / static_cast<double>(totals[1][y]);
      gap = r0 - r1;
      report.gap_max = std::max(report.gap_max, std::abs(gap));
      sq_sum += gap * gap;
      ++defined;
    }
    if (y == 0) {
      report.gap0 = gap;
      report.gap0_defined = ok;
    } else {
      report.gap1 = gap;
      report.gap1_defined = ok;
    }
  }
  report.gap_rms = defined > 0 ? std::sqrt(sq_sum / static_cast<double>(defined)) : 0.0;
  return report;
}

ConsistencyReport consistency(const Ensemble& model, const Dataset& data,
                              const std::string& attribute,
                              const std::vector<CategoryAssignment>& categories) {
  if (categories.size() < 2)
    throw ConfigError("consistency: need at least two categories");
  attribute_columns(data, attribute);  // validates the attribute exists
  const std::size_t n = data.n();

  std::vector<int> agree(n, 1);
  std::vector<int> first(n, 0);
  std::vector<double> row(data.dim());
  for (std::size_t c = 0; c < categories.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto src = data.features.row(i);
      std::copy(src.begin(), src.end(), row.begin());
      for (const auto& [col, value] : categories[c].column_values) {
        if (col >= row.size()) throw DataError("consistency: column out of range");
        row[col] = value;
      }
      const int pred = model.predict_label(row);
      if (c == 0) {
        first[i] = pred;
      } else if (pred != first[i]) {
        agree[i] = 0;
      }
    }
  }
  ConsistencyReport report;
  report.attribute = attribute;
  for (const auto& c : categories) report.categories.push_back(c.name);
  std::size_t count = 0;
  for (int a : agree) count += a;
  report.consistency = static_cast<double>(count) / static_cast<double>(n);
  return report;
}

Certificate certify_drf(const Ensemble& model, const Dataset& data,
                        const ProjectionMetric& metric, double epsilon,
                        InnerSolver solver, const SolverConfig& solver_cfg,
                        std::optional<double> delta) {
  const std::size_t n = data.n();
  std::vector<double> margins(n);
  for (std::size_t i = 0; i < n; ++i)
    margins[i] = model.predict_margin(data.features.row(i));

  LossColumns losses;
  losses.labels = data.labels;
  losses.r0.resize(n);
  losses.r1.resize(n);
  double empirical = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    losses.r0[i] = logistic_loss(margins[i], 0);
    losses.r1[i] = logistic_loss(margins[i], 1);
    empirical += data.labels[i] == 1 ? losses.r1[i] : losses.r0[i];
  }
  empirical /= static_cast<double>(n);

  const CostMatrix cost =
      build_cost_matrix(metric, data, CostMatrix::Mode::kDense);
  SolverConfig cfg = solver_cfg;
  cfg.epsilon = epsilon;
  const InnerSolveResult inner = solve_inner(losses, cost, solver, cfg);

  Certificate cert;
  cert.epsilon = epsilon;
  cert.worst_case = inner.robust;
  cert.empirical = empirical;
  cert.gap = inner.robust - empirical;
  cert.solver = inner_solver_name(solver);
  cert.delta = delta;
  cert.drf = delta.has_value() && inner.robust <= *delta;
  return cert;
}

std::vector<int> group_from_spec(const Dataset& data, const std::string& spec) {
  const std::size_t n = data.n();
  std::vector<int> group(n, 0);

  const auto at = spec.find('@');
  if (at != std::string::npos) {
    const std::string attr = spec.substr(0, at);
    const double threshold = parse_double(spec.substr(at + 1));
    const auto cols = attribute_columns(data, attr);
    if (cols.size() != 1)
      throw ConfigError("group spec '" + spec + "': attribute is not numeric");
    const double t = standardize_raw(data, cols[0], threshold);
    for (std::size_t i = 0; i < n; ++i)
      group[i] = data.features(i, cols[0]) >= t ? 1 : 0;
    return group;
  }

  const auto colon = spec.find(':');
  const std::string attr = colon == std::string::npos ? spec : spec.substr(0, colon);
  const auto cols = attribute_columns(data, attr);
  if (colon != std::string::npos) {
    const std::string level = spec.substr(colon + 1);
    for (std::size_t c : cols) {
      if (level_of(data, c, attr) == level) {
        for (std::size_t i = 0; i < n; ++i)
          group[i] = data.features(i, c) > 0.5 ? 1 : 0;
        return group;
      }
    }
    throw ConfigError("group spec '" + spec + "': unknown level '" + level + "'");
  }
  if (cols.size() == 2) {
    for (std::size_t i = 0; i < n; ++i)
      group[i] = data.features(i, cols[1]) > 0.5 ? 1 : 0;
    return group;
  }
  if (cols.size() == 1) {
    std::set<double> distinct;
    for (std::size_t i = 0; i < n; ++i) distinct.insert(data.features(i, cols[0]));
    if (distinct.size() != 2)
      throw ConfigError("group spec '" + spec +
                        "': attribute is not binary; use attr@threshold");
    const double hi = *distinct.rbegin();
    for (std::size_t i = 0; i < n; ++i)
      group[i] = data.features(i, cols[0]) == hi ? 1 : 0;
    return group;
  }
  throw ConfigError("group spec '" + spec + "': attribute is not binary");
}

std::pair<std::string, std::vector<CategoryAssignment>> consistency_from_spec(
    const Dataset& data, const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string attr = colon == std::string::npos ? spec : spec.substr(0, colon);
  const auto cols = attribute_columns(data, attr);

  std::vector<CategoryAssignment> categories;
  const bool one_hot = cols.size() > 1;
  if (colon == std::string::npos) {
    if (!one_hot)
      throw ConfigError("consistency spec '" + spec +
                        "': numeric attribute needs explicit values (attr:v1,v2)");
    for (std::size_t c : cols) {
      CategoryAssignment cat;
      cat.name = level_of(data, c, attr);
      for (std::size_t other : cols) cat.column_values.push_back({other, 0.0});
      cat.column_values.push_back({c, 1.0});
      categories.push_back(std::move(cat));
    }
    return {attr, categories};
  }

  const auto parts = split_on(spec.substr(colon + 1), ',');
  for (const auto& part : parts) {
    if (part.empty()) continue;
    CategoryAssignment cat;
    cat.name = part;
    if (one_hot) {
      bool found = false;
      for (std::size_t c : cols) {
        const bool match = level_of(data, c, attr) == part;
        found = found || match;
        cat.column_values.push_back({c, match ? 1.0 : 0.0});
      }
      if (!found)
        throw ConfigError("consistency spec '" + spec + "': unknown level '" + part +
                          "'");
    } else {
      cat.column_values.push_back(
          {cols[0], standardize_raw(data, cols[0], parse_double(part))});
    }
    categories.push_back(std::move(cat));
  }
  if (categories.size() < 2)
    throw ConfigError("consistency spec '" + spec + "': need at least two values");
  return {attr, categories};
}

AuditReport run_audit(const Ensemble& model, const Dataset& data,
                      const ProjectionMetric& metric, const AuditOptions& options) {
  AuditReport report;
  const std::vector<int> preds = predict_labels(model, data);
  report.balanced_accuracy = balanced_accuracy(preds, data.labels);
  for (const auto& spec : options.gap_specs) {
    report.gaps.push_back(
        group_gaps(preds, data.labels, group_from_spec(data, spec), spec));
  }
  for (const auto& spec : options.consistency_specs) {
    const auto [attr, cats] = consistency_from_spec(data, spec);
    report.consistencies.push_back(consistency(model, data, attr, cats));
  }
  for (double eps : options.epsilons) {
    report.certificates.push_back(certify_drf(model, data, metric, eps,
                                              options.solver, options.solver_cfg,
                                              options.delta));
  }
  return report;
}

}  // namespace fairboost
