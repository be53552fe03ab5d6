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
#include "fairboost/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace fairboost {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

LossColumns losses_at(std::span<const double> margins, const std::vector<int>& labels) {
  LossColumns lc;
  const std::size_t n = labels.size();
  lc.r0.resize(n);
  lc.r1.resize(n);
  lc.labels = labels;
  for (std::size_t i = 0; i < n; ++i) {
    lc.r0[i] = logistic_loss(margins[i], 0);
    lc.r1[i] = logistic_loss(margins[i], 1);
  }
  return lc;
}

double gamma_default(const LossColumns& losses) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < losses.n(); ++i) {
    lo = std::min({lo, losses.r0[i], losses.r1[i]});
    hi = std::max({hi, losses.r0[i], losses.r1[i]});
  }
  return 0.01 * std::max(hi - lo, 1e-12);
}

CostMatrix cost_for(const Dataset& data, const ProjectionMetric& metric,
                    const BuDROConfig& cfg) {
  if (cfg.neighbor_sparse) {
    return build_cost_matrix(metric, data, CostMatrix::Mode::kNeighborSparse, cfg.tau,
                             cfg.threads);
  }
  return build_cost_matrix(metric, data, CostMatrix::Mode::kDense,
                           std::numeric_limits<double>::infinity(), cfg.threads);
}

}  // namespace

InnerSolver inner_solver_from_name(const std::string& name) {
  if (name == "dual-bisection") return InnerSolver::kDualBisection;
  if (name == "dual-sgd") return InnerSolver::kDualSgd;
  if (name == "entropic") return InnerSolver::kEntropic;
  if (name == "entropic-sgd") return InnerSolver::kEntropicSgd;
  throw ConfigError("unknown solver '" + name +
                    "' (expected dual-bisection|dual-sgd|entropic|entropic-sgd)");
}

std::string inner_solver_name(InnerSolver solver) {
  switch (solver) {
    case InnerSolver::kDualBisection: return "dual-bisection";
    case InnerSolver::kDualSgd: return "dual-sgd";
    case InnerSolver::kEntropic: return "entropic";
    case InnerSolver::kEntropicSgd: return "entropic-sgd";
  }
  return "?";
}

InnerSolveResult solve_inner(const LossColumns& losses, const CostMatrix& cost,
                             InnerSolver solver, const SolverConfig& cfg) {
  InnerSolveResult out;
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-9;
  switch (solver) {
    case InnerSolver::kDualBisection: {
      DualSolution sol = solve_dual_bisection(losses, cost, cfg.epsilon, tol);
      out.plan = std::move(sol.plan);
      out.eta = sol.eta;
      break;
    }
    case InnerSolver::kDualSgd: {
      DualSolution sol = solve_dual_sgd(losses, cost, cfg);
      out.plan = std::move(sol.plan);
      out.eta = sol.eta;
      break;
    }
    case InnerSolver::kEntropic: {
      const double gamma = cfg.gamma > 0.0 ? cfg.gamma : gamma_default(losses);
      out.plan = solve_entropic(losses, cost, cfg.epsilon, gamma, tol, &out.eta);
      break;
    }
    case InnerSolver::kEntropicSgd: {
      out.plan = solve_entropic_sgd(losses, cost, cfg, &out.eta);
      break;
    }
  }
  out.robust = worst_case_loss(losses, out.plan);
  out.cost = plan_cost(cost, out.plan);
  return out;
}

std::vector<double> danskin_gradient(const TransportPlan& plan,
                                     std::span<const double> margins,
                                     const std::vector<int>& labels) {
  const std::size_t n = plan.n;
  if (margins.size() != n || labels.size() != n)
    throw DataError("danskin_gradient: size mismatch");
  const std::vector<double> w = plan_marginals(plan, labels);
  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = sigmoid(margins[i]);
    grad[i] = s * w[i] + (s - 1.0) * w[n + i];
  }
  return grad;
}

std::vector<double> build_weights(const TransportPlan& plan,
                                  const std::vector<int>& labels) {
  return plan_marginals(plan, labels);
}

WeightedExamples augmented_examples(const Dataset& data) {
  const std::size_t n = data.n();
  const std::size_t d = data.dim();
  WeightedExamples ex;
  ex.features = Matrix(2 * n, d);
  ex.targets.resize(2 * n);
  ex.weights.assign(2 * n, 0.0);
  for (int k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = static_cast<std::size_t>(k) * n + i;
      auto dst = ex.features.row(a);
      auto src = data.features.row(i);
      std::copy(src.begin(), src.end(), dst.begin());
      ex.targets[a] = k;
    }
  }
  return ex;
}

namespace {

std::vector<double> plain_weights(const Dataset& data) {
  const std::size_t n = data.n();
  std::vector<double> w(2 * n, 0.0);
  const double u = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(data.labels[i]) * n + i] = u;
  }
  return w;
}

double empirical_loss(std::span<const double> margins, const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    total += logistic_loss(margins[i], labels[i]);
  return total / static_cast<double>(labels.size());
}

}  // namespace

std::pair<Ensemble, TrainingTrace> train_budro(const Dataset& train,
                                               const ProjectionMetric& metric,
                                               const BuDROConfig& cfg) {
  if (train.n() == 0) throw DataError("train_budro: empty dataset");
  if (cfg.steps < 1) throw ConfigError("train_budro: steps must be >= 1");
  if (metric.dim() != train.dim())
    throw DataError("train_budro: metric dimension mismatch");

  const std::size_t n = train.n();
  const CostMatrix cost = cost_for(train, metric, cfg);

  WeightedExamples ex = augmented_examples(train);
  std::vector<double> margins(2 * n, cfg.boost_cfg.base_margin);

  Ensemble model;
  model.base_margin = cfg.boost_cfg.base_margin;
  ex.weights = plain_weights(train);
  model = boost_step_at(model, ex, margins, cfg.boost_cfg);

  TrainingTrace trace;
  SolverConfig solver_cfg = cfg.solver_cfg;
  solver_cfg.epsilon = cfg.epsilon;

  for (int t = 0; t < cfg.steps; ++t) {
    const double t0 = now_seconds();
    const LossColumns losses = losses_at({margins.data(), n}, train.labels);
    solver_cfg.seed = cfg.solver_cfg.seed + static_cast<std::uint64_t>(t);
    InnerSolveResult inner;
    try {
      inner = solve_inner(losses, cost, cfg.solver, solver_cfg);
    } catch (const SolverError& err) {
      throw SolverError("inner solve failed at step " + std::to_string(t) + ": " +
                        err.what());
    }
    ex.weights = plan_marginals(inner.plan, train.labels);
    model = boost_step_at(model, ex, margins, cfg.boost_cfg);

    StepRecord rec;
    rec.t = t;
    rec.robust_loss = inner.robust;
    rec.empirical_loss = empirical_loss({margins.data(), n}, train.labels);
    rec.plan_cost = inner.cost;
    rec.eta_dual = inner.eta;
    rec.seconds = now_seconds() - t0;
    trace.steps.push_back(rec);
  }
  return {std::move(model), std::move(trace)};
}

std::pair<Ensemble, TrainingTrace> train_plain_weighted(
    const Dataset& train, const BoostConfig& boost_cfg, int steps,
    const std::vector<double>* row_weights) {
  if (train.n() == 0) throw DataError("train_plain_weighted: empty dataset");
  if (steps < 1) throw ConfigError("train_plain_weighted: steps must be >= 1");
  const std::size_t n = train.n();
  WeightedExamples ex = augmented_examples(train);
  if (row_weights) {
    if (row_weights->size() != n)
      throw DataError("train_plain_weighted: row_weights size mismatch");
    ex.weights.assign(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if ((*row_weights)[i] < 0.0)
        throw DataError("train_plain_weighted: negative weight");
      ex.weights[static_cast<std::size_t>(train.labels[i]) * n + i] =
          (*row_weights)[i];
    }
  } else {
    ex.weights = plain_weights(train);
  }
  std::vector<double> margins(2 * n, boost_cfg.base_margin);

  Ensemble model;
  model.base_margin = boost_cfg.base_margin;
  TrainingTrace trace;
  for (int t = 0; t < steps; ++t) {
    const double t0 = now_seconds();
    model = boost_step_at(model, ex, margins, boost_cfg);
    StepRecord rec;
    rec.t = t;
    rec.empirical_loss = empirical_loss({margins.data(), n}, train.labels);
    rec.robust_loss = rec.empirical_loss;
    rec.seconds = now_seconds() - t0;
    trace.steps.push_back(rec);
  }
  return {std::move(model), std::move(trace)};
}

GenericTrainResult train_fair_generic(const Dataset& train,
                                      const ProjectionMetric& metric,
                                      const BuDROConfig& cfg, const WeakFit& weak_fit,
                                      StepRule rule) {
  if (train.n() == 0) throw DataError("train_fair_generic: empty dataset");
  const std::size_t n = train.n();
  const CostMatrix cost = cost_for(train, metric, cfg);
  const double omega1 = 1.0 / (4.0 * static_cast<double>(n));

  GenericTrainResult result;
  result.margins.assign(n, cfg.boost_cfg.base_margin);
  SolverConfig solver_cfg = cfg.solver_cfg;
  solver_cfg.epsilon = cfg.epsilon;

  for (int t = 0; t < cfg.steps; ++t) {
    const double t0 = now_seconds();
    const LossColumns losses = losses_at(result.margins, train.labels);
    solver_cfg.seed = cfg.solver_cfg.seed + static_cast<std::uint64_t>(t);
    const InnerSolveResult inner = solve_inner(losses, cost, cfg.solver, solver_cfg);

    const std::vector<double> grad =
        danskin_gradient(inner.plan, result.margins, train.labels);
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = -grad[i];
    const std::vector<double> h = weak_fit(residual);
    if (h.size() != n) throw DataError("weak_fit returned wrong size");

    double gh = 0.0, hh = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gh += grad[i] * h[i];
      hh += h[i] * h[i];
    }

    StepRecord rec;
    rec.t = t;
    rec.robust_loss = inner.robust;
    rec.plan_cost = inner.cost;
    rec.eta_dual = inner.eta;
    if (gh >= 0.0 || hh == 0.0) {
      rec.rejected = true;
    } else {
      const double alpha =
          rule == StepRule::kTheoretical ? -gh / (omega1 * hh) : cfg.boost_cfg.eta;
      for (std::size_t i = 0; i < n; ++i) result.margins[i] += alpha * h[i];
    }
    rec.empirical_loss = empirical_loss(result.margins, train.labels);
    rec.seconds = now_seconds() - t0;
    result.trace.steps.push_back(rec);
  }
  return result;
}

}  // namespace fairboost
