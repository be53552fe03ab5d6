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
#ifndef FAIRBOOST_EVALUATE_HPP_
#define FAIRBOOST_EVALUATE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "fairboost/dataset.hpp"
#include "fairboost/fair_metric.hpp"
#include "fairboost/gbdt.hpp"
#include "fairboost/train.hpp"

namespace fairboost {

/// Per-outcome true-rate differences between two groups:
/// gap_y = P(pred=y | label=y, g=0) - P(pred=y | label=y, g=1).
struct GapReport {
  std::string attribute;
  double gap0 = 0.0;
  double gap1 = 0.0;
  bool gap0_defined = false;  // a group without outcome y has no rate
  bool gap1_defined = false;
  double gap_max = 0.0;  // max |gap_y| over defined outcomes
  double gap_rms = 0.0;  // sqrt(mean gap_y^2) over defined outcomes
};

struct ConsistencyReport {
  std::string attribute;
  std::vector<std::string> categories;
  double consistency = 0.0;  // fraction predicted identically on every copy
};

struct Certificate {
  double epsilon = 0.0;
  double worst_case = 0.0;  // L(f): adversarial loss at budget epsilon
  double empirical = 0.0;   // mean loss at the true labels
  double gap = 0.0;         // worst_case - empirical, >= 0
  std::string solver;
  std::optional<double> delta;
  bool drf = false;  // worst_case <= delta (when delta given)
};

double balanced_accuracy(const std::vector<int>& predictions,
                         const std::vector<int>& labels);

GapReport group_gaps(const std::vector<int>& predictions,
                     const std::vector<int>& labels, const std::vector<int>& group,
                     const std::string& attribute = "");

/// One counterfactual copy of the data: the attribute's encoded columns are
/// overwritten with these values.
struct CategoryAssignment {
  std::string name;
  std::vector<std::pair<std::size_t, double>> column_values;
};

ConsistencyReport consistency(const Ensemble& model, const Dataset& data,
                              const std::string& attribute,
                              const std::vector<CategoryAssignment>& categories);

Certificate certify_drf(const Ensemble& model, const Dataset& data,
                        const ProjectionMetric& metric, double epsilon,
                        InnerSolver solver, const SolverConfig& solver_cfg,
                        std::optional<double> delta = std::nullopt);

/// Binary group vector from a spec string: `attr` (binary attribute),
/// `attr:level` (rows of that one-hot level), or `attr@threshold` (numeric;
/// group 1 is raw value >= threshold, destandardized via the stored stats).
std::vector<int> group_from_spec(const Dataset& data, const std::string& spec);

/// Counterfactual categories from a spec string: `attr` (every one-hot
/// level), `attr:levelA,levelB` (subset), or numeric `attr:v1,v2` (raw
/// values).
std::pair<std::string, std::vector<CategoryAssignment>> consistency_from_spec(
    const Dataset& data, const std::string& spec);

struct AuditOptions {
  std::vector<double> epsilons;
  std::vector<std::string> gap_specs;
  std::vector<std::string> consistency_specs;
  std::optional<double> delta;
  InnerSolver solver = InnerSolver::kDualBisection;
  SolverConfig solver_cfg;
};

struct AuditReport {
  double balanced_accuracy = 0.0;
  std::vector<GapReport> gaps;
  std::vector<ConsistencyReport> consistencies;
  std::vector<Certificate> certificates;
};

AuditReport run_audit(const Ensemble& model, const Dataset& data,
                      const ProjectionMetric& metric, const AuditOptions& options);

std::vector<int> predict_labels(const Ensemble& model, const Dataset& data);

}  // namespace fairboost

#endif  // FAIRBOOST_EVALUATE_HPP_
