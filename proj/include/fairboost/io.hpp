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
#ifndef FAIRBOOST_IO_HPP_
#define FAIRBOOST_IO_HPP_

#include <string>
#include <utility>
#include <vector>

#include "fairboost/dataset.hpp"
#include "fairboost/evaluate.hpp"
#include "fairboost/fair_metric.hpp"
#include "fairboost/gbdt.hpp"
#include "fairboost/ot_solver.hpp"
#include "fairboost/train.hpp"

// Versioned structured-text formats. Every file starts with a
// "fairboost.<kind> <version>" tag line; floats are written in shortest
// round-trip form, so save/load is value-exact and identical runs are
// byte-identical.

namespace fairboost {

std::string dataset_to_text(const Dataset& data);
Dataset dataset_from_text(const std::string& text);

std::string metric_to_text(const ProjectionMetric& metric);
ProjectionMetric metric_from_text(const std::string& text);

std::string model_to_text(const Ensemble& model);
Ensemble model_from_text(const std::string& text);

std::string trace_to_text(const TrainingTrace& trace);
TrainingTrace trace_from_text(const std::string& text);

std::string report_to_text(const AuditReport& report);

/// Standalone inner-problem instance for the solve command.
struct SolverInstance {
  LossColumns losses;
  Matrix cost;  // n x n
  double epsilon = 0.0;
};

std::string instance_to_text(const SolverInstance& instance);
SolverInstance instance_from_text(const std::string& text);

CostMatrix dense_cost_from_matrix(Matrix c);

std::string plan_to_text(const TransportPlan& plan, double eta, double dual_value,
                         double primal_value, double cost);

/// Flat key=value configuration with [section] headers and '#' comments.
/// Duplicate keys are preserved in order (used for repeatable options).
class KvConfig {
 public:
  static KvConfig parse(const std::string& text);

  void set(const std::string& section, const std::string& key,
           const std::string& value);
  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback = "") const;
  std::vector<std::string> get_all(const std::string& section,
                                   const std::string& key) const;
  /// Every key present in a section (for unknown-key validation).
  std::vector<std::string> keys(const std::string& section) const;

 private:
  struct Item {
    std::string section;
    std::string key;
    std::string value;
  };
  std::vector<Item> items_;
};

}  // namespace fairboost

#endif  // FAIRBOOST_IO_HPP_
