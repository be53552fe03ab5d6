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
#ifndef FAIRBOOST_OT_SOLVER_HPP_
#define FAIRBOOST_OT_SOLVER_HPP_

#include <cstdint>
#include <vector>

#include "fairboost/common.hpp"
#include "fairboost/fair_metric.hpp"

// Solvers for the adversarial inner problem
//
//     max_{Pi}  <R, Pi>   s.t.  Pi >= 0,  column sums = 1/n,  <C, Pi> <= eps
//
// where R_ij is the loss at point i under column j's label. Binary labels
// make R rank-limited, so it is stored as the two loss columns r0/r1.
// The dual is a univariate problem in the budget multiplier eta:
//
//     min_{eta >= 0}  M(eta) = eps*eta + (1/n) sum_j max_i (R_ij - eta*C_ij)
//
// M is piecewise linear and convex; the minimum sits at eta = 0 or at a
// corner where some column's argmax changes. All solvers here work on that
// structure: exact bisection on the subgradient, corner enumeration (the
// test oracle), stochastic subgradient descent, and two entropic smoothings.

namespace fairboost {

/// Losses of every point under both labels: r0[i] = loss(f(x_i), 0),
/// r1[i] = loss(f(x_i), 1). R_ij = labels[j] == 1 ? r1[i] : r0[i].
struct LossColumns {
  std::vector<double> r0;
  std::vector<double> r1;
  std::vector<int> labels;

  std::size_t n() const { return labels.size(); }
  double at(std::size_t i, std::size_t j) const {
    return labels[j] == 1 ? r1[i] : r0[i];
  }
};

/// Column-sparse transport plan; every column sums to 1/n.
struct TransportPlan {
  struct Entry {
    std::uint32_t row;
    double mass;
  };
  std::size_t n = 0;
  std::vector<std::vector<Entry>> columns;

  double column_sum(std::size_t j) const;
};

struct DualSolution {
  double eta = 0.0;
  double dual_value = 0.0;
  double primal_value = 0.0;
  TransportPlan plan;
  double plan_cost = 0.0;
  /// set when exact recovery was infeasible and the randomized heuristic
  /// was used instead
  bool heuristic_fallback = false;
  /// set when the returned plan spends more than the budget (possible for
  /// the heuristic recovery, which does not enforce it)
  bool budget_exceeded = false;
};

struct SolverConfig {
  double epsilon = 0.0;
  double gamma = 0.0;  // <= 0: use 0.01 * (max R - min R)
  std::size_t batch_size = 200;
  double alpha0 = 1e-4;  // step size alpha_t = alpha0 / sqrt(t)
  double momentum = 0.9;
  std::size_t max_iters = 100;
  double tol = 1e-9;
  double eta0 = 0.1;
  std::uint64_t seed = 0;
};

/// M(eta); in sparse mode each column maximizes over its neighbor list plus
/// the diagonal.
double dual_objective(const LossColumns& losses, const CostMatrix& cost, double eps,
                      double eta);

/// An element of the subdifferential of M: eps - (1/n) sum_j C[i_j, j] with
/// i_j the argmax of R_ij - eta*C_ij (ties: smallest cost, then smallest
/// index). With that tie rule this is the right derivative of M.
double dual_subgradient(const LossColumns& losses, const CostMatrix& cost, double eps,
                        double eta);

/// Exact LP solution: bisection on the subgradient sign change down to
/// floating-point bracket collapse, then complementary-slackness recovery.
DualSolution solve_dual_bisection(const LossColumns& losses, const CostMatrix& cost,
                                  double eps, double tol);

/// Deterministic recovery at the optimal corner: unique-argmax columns take
/// the full 1/n; tied columns are split greedily in increasing column index
/// until the plan cost hits eps exactly (eta* > 0). Sets *fell_back and
/// delegates to the randomized heuristic when the reconstruction is
/// inconsistent beyond 1e-8.
TransportPlan recover_primal_exact(const LossColumns& losses, const CostMatrix& cost,
                                   double eps, double eta_star,
                                   bool* fell_back = nullptr);

/// Each column puts its full 1/n on one argmax row chosen uniformly among
/// ties (seeded). May exceed the budget; callers check plan_cost.
TransportPlan recover_primal_heuristic(const LossColumns& losses,
                                       const CostMatrix& cost, double eta_star,
                                       std::uint64_t seed);

/// Projected stochastic subgradient descent on M; primal via the randomized
/// heuristic at the final eta. batch_size >= n runs deterministic full
/// batches.
DualSolution solve_dual_sgd(const LossColumns& losses, const CostMatrix& cost,
                            const SolverConfig& cfg);

/// m(eta) = eps - <C, Pi(eta)> for the entropic plan
/// Pi_ij(eta) = exp((R_ij - eta*C_ij)/gamma) / (n * column normalizer).
/// Evaluated in log space.
double sinkhorn_objective(const LossColumns& losses, const CostMatrix& cost,
                          double eps, double gamma, double eta);

/// Entropy-regularized plan: root-finds m(eta) = 0 by bracketed bisection
/// (returns the eta = 0 plan when the budget is slack there). The returned
/// plan is strictly positive on all admissible entries and never spends
/// more than eps.
TransportPlan solve_entropic(const LossColumns& losses, const CostMatrix& cost,
                             double eps, double gamma, double root_tol,
                             double* eta_out = nullptr);

/// SGD on the smoothed dual eta -> E_j[eta*eps + gamma*logsumexp_i((R_ij -
/// eta*C_ij)/gamma)]; plan via the entropic primal formula at the final eta.
TransportPlan solve_entropic_sgd(const LossColumns& losses, const CostMatrix& cost,
                                 const SolverConfig& cfg, double* eta_out = nullptr);

/// Exact reference solver for tests: enumerates every corner of M (all
/// nonnegative pairwise crossing ratios per column, plus 0), takes the
/// minimizer, and reconstructs the primal. Asserts primal == dual, which by
/// weak duality certifies exact optimality. Guarded to n <= 50.
DualSolution corner_enumeration_oracle(const LossColumns& losses,
                                       const CostMatrix& cost, double eps);

/// Weights of the augmented points: w[k*n + i] = sum_{j: labels[j]=k} Pi_ij.
/// Nonnegative, sums to 1.
std::vector<double> plan_marginals(const TransportPlan& plan,
                                   const std::vector<int>& labels);

/// <R, Pi>
double worst_case_loss(const LossColumns& losses, const TransportPlan& plan);

/// <C, Pi>
double plan_cost(const CostMatrix& cost, const TransportPlan& plan);

TransportPlan identity_plan(std::size_t n);

}  // namespace fairboost

#endif  // FAIRBOOST_OT_SOLVER_HPP_
