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
#ifndef FAIRBOOST_TRAIN_HPP_
#define FAIRBOOST_TRAIN_HPP_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fairboost/dataset.hpp"
#include "fairboost/fair_metric.hpp"
#include "fairboost/gbdt.hpp"
#include "fairboost/ot_solver.hpp"

// Training drivers. The weighted driver alternates an inner transport solve
// with one weighted boosting step on the label-augmented set; the residual
// driver is the generic functional-gradient form driven by the envelope
// gradient of the worst-case loss.

namespace fairboost {

enum class InnerSolver { kDualBisection, kDualSgd, kEntropic, kEntropicSgd };

InnerSolver inner_solver_from_name(const std::string& name);
std::string inner_solver_name(InnerSolver solver);

struct BuDROConfig {
  double epsilon = 0.1;
  int steps = 10;
  InnerSolver solver = InnerSolver::kDualBisection;
  SolverConfig solver_cfg;
  BoostConfig boost_cfg;
  bool neighbor_sparse = false;  // restrict transports to cost <= tau
  double tau = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct StepRecord {
  int t = 0;
  double robust_loss = 0.0;     // <R_t, Pi_t>
  double empirical_loss = 0.0;  // mean loss at the true labels
  double plan_cost = 0.0;       // <C, Pi_t>
  double eta_dual = 0.0;
  double seconds = 0.0;
  bool rejected = false;  // residual mode: not a descent direction
};

struct TrainingTrace {
  std::vector<StepRecord> steps;
};

struct InnerSolveResult {
  TransportPlan plan;
  double eta = 0.0;
  double robust = 0.0;
  double cost = 0.0;
};

/// One inner adversarial solve with the configured method; the gamma default
/// (when cfg.gamma <= 0) is 0.01 * (max R - min R).
InnerSolveResult solve_inner(const LossColumns& losses, const CostMatrix& cost,
                             InnerSolver solver, const SolverConfig& cfg);

/// Envelope gradient of the worst-case loss at the maximizing plan:
/// component i is sum_k (sigma(f_i) - k) * P(i, k) with P the plan marginals.
std::vector<double> danskin_gradient(const TransportPlan& plan,
                                     std::span<const double> margins,
                                     const std::vector<int>& labels);

/// Weighted-mode training: cost matrix built once, then per step the inner
/// problem is solved at the current margins and one boosting step runs on
/// the augmented set weighted by the plan marginals. The first tree is a
/// plain step with uniform weight on the true-label copies.
std::pair<Ensemble, TrainingTrace> train_budro(const Dataset& train,
                                               const ProjectionMetric& metric,
                                               const BuDROConfig& cfg);

/// Plain weighted boosting on the augmented set (uniform 1/n on true-label
/// copies); `steps` trees in total. The epsilon = 0 reference path. When
/// `row_weights` is given (length n, e.g. from reweighing), the true-label
/// copies carry those weights as given; note that lambda and
/// min_child_weight are sensitive to the weight scale.
std::pair<Ensemble, TrainingTrace> train_plain_weighted(
    const Dataset& train, const BoostConfig& boost_cfg, int steps,
    const std::vector<double>* row_weights = nullptr);

enum class StepRule { kFixed, kTheoretical };

/// Fits a base learner to the negated envelope gradient each step. The
/// callback receives the residual vector (one value per training point) and
/// returns the learner's predictions at those points.
using WeakFit = std::function<std::vector<double>(const std::vector<double>&)>;

struct GenericTrainResult {
  std::vector<double> margins;  // final scores at the training points
  TrainingTrace trace;
};

/// Residual-mode driver. With StepRule::kTheoretical the step size is
/// <r, h> / (omega1 * ||h||^2) with omega1 = 1 / (4n); steps that are not
/// descent directions are rejected and recorded.
GenericTrainResult train_fair_generic(const Dataset& train,
                                      const ProjectionMetric& metric,
                                      const BuDROConfig& cfg, const WeakFit& weak_fit,
                                      StepRule rule);

/// Plan marginals reordered per the augmented-set layout (label-0 block then
/// label-1 block).
std::vector<double> build_weights(const TransportPlan& plan,
                                  const std::vector<int>& labels);

/// The 2n-row training view of a dataset: every row twice, label-0 copies
/// first.
WeightedExamples augmented_examples(const Dataset& data);

}  // namespace fairboost

#endif  // FAIRBOOST_TRAIN_HPP_
