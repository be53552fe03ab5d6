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
#include "fairboost/ot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairboost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Applies f(i, C_ij) to every admissible row of column j.
template <typename F>
void for_each_admissible(const CostMatrix& cost, std::size_t j, F&& f) {
  if (cost.is_dense()) {
    for (std::size_t i = 0; i < cost.n; ++i) f(i, cost.dense(i, j));
  } else {
    for (const auto& e : cost.columns[j]) f(static_cast<std::size_t>(e.row), e.cost);
  }
}

struct ArgmaxResult {
  std::size_t row = 0;
  double value = -kInf;
  double cost = kInf;
};

// argmax_i R_ij - eta*C_ij; exact-value ties broken by smallest cost, then
// smallest row index.
ArgmaxResult column_argmax(const LossColumns& losses, const CostMatrix& cost,
                           std::size_t j, double eta) {
  ArgmaxResult best;
  for_each_admissible(cost, j, [&](std::size_t i, double c) {
    const double v = losses.at(i, j) - eta * c;
    if (v > best.value ||
        (v == best.value && (c < best.cost || (c == best.cost && i < best.row)))) {
      best.row = i;
      best.value = v;
      best.cost = c;
    }
  });
  return best;
}

double loss_scale(const LossColumns& losses) {
  double m = 0.0;
  for (double v : losses.r0) m = std::max(m, std::abs(v));
  for (double v : losses.r1) m = std::max(m, std::abs(v));
  return m;
}

double max_cost(const CostMatrix& cost) {
  double m = 0.0;
  if (cost.is_dense()) {
    for (double c : cost.dense.data) m = std::max(m, c);
  } else {
    for (const auto& col : cost.columns)
      for (const auto& e : col) m = std::max(m, e.cost);
  }
  return m;
}

// Above this eta every column's maximizer has zero cost, so the subgradient
// equals eps >= 0.
double eta_upper_bound(const LossColumns& losses, const CostMatrix& cost) {
  double hi = 0.0;
  const std::size_t n = losses.n();
  for (std::size_t j = 0; j < n; ++j) {
    const double r_diag = losses.at(j, j);
    for_each_admissible(cost, j, [&](std::size_t i, double c) {
      if (c > 0.0) hi = std::max(hi, (losses.at(i, j) - r_diag) / c);
    });
  }
  return hi + 1.0;
}

struct ColumnTies {
  std::vector<std::size_t> rows;  // rows whose line is within tol of the max
  double cmin = kInf, cmax = -kInf;
  std::size_t row_cmin = 0, row_cmax = 0;
};

ColumnTies column_tie_set(const LossColumns& losses, const CostMatrix& cost,
                          std::size_t j, double eta, double atol) {
  double lam = -kInf;
  for_each_admissible(cost, j, [&](std::size_t i, double c) {
    lam = std::max(lam, losses.at(i, j) - eta * c);
  });
  ColumnTies t;
  for_each_admissible(cost, j, [&](std::size_t i, double c) {
    const double v = losses.at(i, j) - eta * c;
    if (v >= lam - atol) {
      t.rows.push_back(i);
      if (c < t.cmin) {
        t.cmin = c;
        t.row_cmin = i;
      }
      if (c > t.cmax) {
        t.cmax = c;
        t.row_cmax = i;
      }
    }
  });
  return t;
}

}  // namespace

double CostMatrix::at(std::size_t i, std::size_t j) const {
  if (is_dense()) return dense(i, j);
  for (const auto& e : columns[j]) {
    if (e.row == i) return e.cost;
  }
  return kInf;
}

double TransportPlan::column_sum(std::size_t j) const {
  double s = 0.0;
  for (const auto& e : columns[j]) s += e.mass;
  return s;
}

double dual_objective(const LossColumns& losses, const CostMatrix& cost, double eps,
                      double eta) {
  const std::size_t n = losses.n();
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += column_argmax(losses, cost, j, eta).value;
  return eps * eta + sum / static_cast<double>(n);
}

double dual_subgradient(const LossColumns& losses, const CostMatrix& cost, double eps,
                        double eta) {
  const std::size_t n = losses.n();
  double csum = 0.0;
  for (std::size_t j = 0; j < n; ++j) csum += column_argmax(losses, cost, j, eta).cost;
  return eps - csum / static_cast<double>(n);
}

TransportPlan identity_plan(std::size_t n) {
  TransportPlan plan;
  plan.n = n;
  plan.columns.resize(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j)
    plan.columns[j].push_back({static_cast<std::uint32_t>(j), w});
  return plan;
}

TransportPlan recover_primal_exact(const LossColumns& losses, const CostMatrix& cost,
                                   double eps, double eta_star, bool* fell_back) {
  if (fell_back) *fell_back = false;
  const std::size_t n = losses.n();
  const double w = 1.0 / static_cast<double>(n);
  TransportPlan plan;
  plan.n = n;
  plan.columns.resize(n);

  if (eta_star <= 0.0) {
    // Budget multiplier inactive: every column takes its best loss row
    // (cheapest among ties keeps the plan inside the budget).
    for (std::size_t j = 0; j < n; ++j) {
      const auto best = column_argmax(losses, cost, j, 0.0);
      plan.columns[j].push_back({static_cast<std::uint32_t>(best.row), w});
    }
    return plan;
  }

  const double atol =
      1e-9 * (1.0 + loss_scale(losses) + eta_star * max_cost(cost));
  std::vector<ColumnTies> ties(n);
  double total_min = 0.0, total_max = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    ties[j] = column_tie_set(losses, cost, j, eta_star, atol);
    total_min += w * ties[j].cmin;
    total_max += w * ties[j].cmax;
  }

  const double slack = 1e-8 * std::max({1.0, std::abs(eps), total_max});
  if (eps < total_min - slack || eps > total_max + slack) {
    if (fell_back) *fell_back = true;
    return recover_primal_heuristic(losses, cost, eta_star, 0);
  }

  // Start every column at its cheapest tied row, then raise the plan cost to
  // eps by shifting mass toward the most expensive tied row, column by
  // column in increasing index.
  double deficit = eps - total_min;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& t = ties[j];
    const double span = t.cmax - t.cmin;
    double moved = 0.0;
    if (deficit > 0.0 && span > 0.0) {
      moved = std::min(w, deficit / span);
      deficit -= moved * span;
    }
    auto& col = plan.columns[j];
    if (moved >= w) {
      col.push_back({static_cast<std::uint32_t>(t.row_cmax), w});
    } else if (moved > 0.0) {
      col.push_back({static_cast<std::uint32_t>(t.row_cmin), w - moved});
      col.push_back({static_cast<std::uint32_t>(t.row_cmax), moved});
    } else {
      col.push_back({static_cast<std::uint32_t>(t.row_cmin), w});
    }
  }
  return plan;
}

TransportPlan recover_primal_heuristic(const LossColumns& losses,
                                       const CostMatrix& cost, double eta_star,
                                       std::uint64_t seed) {
  const std::size_t n = losses.n();
  const double w = 1.0 / static_cast<double>(n);
  const double atol =
      1e-9 * (1.0 + loss_scale(losses) + std::abs(eta_star) * max_cost(cost));
  Rng rng(seed);
  TransportPlan plan;
  plan.n = n;
  plan.columns.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto t = column_tie_set(losses, cost, j, eta_star, atol);
    const std::size_t pick = t.rows[rng.uniform_int(t.rows.size())];
    plan.columns[j].push_back({static_cast<std::uint32_t>(pick), w});
  }
  return plan;
}

DualSolution solve_dual_bisection(const LossColumns& losses, const CostMatrix& cost,
                                  double eps, double tol) {
  if (eps < 0.0) throw ConfigError("solve_dual_bisection: eps must be >= 0");
  if (tol <= 0.0) throw ConfigError("solve_dual_bisection: tol must be > 0");

  DualSolution sol;
  if (dual_subgradient(losses, cost, eps, 0.0) >= 0.0) {
    sol.eta = 0.0;
  } else {
    double lo = 0.0;
    double hi = eta_upper_bound(losses, cost);
    while (dual_subgradient(losses, cost, eps, hi) < 0.0) hi *= 2.0;  // safety
    // Collapse the bracket to floating-point resolution; the corner is then
    // pinned far tighter than any caller tolerance.
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (dual_subgradient(losses, cost, eps, mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    sol.eta = hi;
  }
  bool fell_back = false;
  sol.plan = recover_primal_exact(losses, cost, eps, sol.eta, &fell_back);
  sol.heuristic_fallback = fell_back;
  sol.dual_value = dual_objective(losses, cost, eps, sol.eta);
  sol.primal_value = worst_case_loss(losses, sol.plan);
  sol.plan_cost = plan_cost(cost, sol.plan);
  sol.budget_exceeded = sol.plan_cost > eps * (1.0 + 1e-6) + 1e-12;
  return sol;
}

DualSolution corner_enumeration_oracle(const LossColumns& losses,
                                       const CostMatrix& cost, double eps) {
  const std::size_t n = losses.n();
  if (n > 50) throw ConfigError("corner_enumeration_oracle: n > 50 test-scale guard");
  if (eps < 0.0) throw ConfigError("corner_enumeration_oracle: eps must be >= 0");

  std::vector<double> candidates = {0.0};
  std::vector<std::pair<double, double>> lines;  // (loss, cost) per admissible row
  for (std::size_t j = 0; j < n; ++j) {
    lines.clear();
    for_each_admissible(cost, j,
                        [&](std::size_t i, double c) { lines.push_back({losses.at(i, j), c}); });
    for (std::size_t a = 0; a < lines.size(); ++a) {
      for (std::size_t b = a + 1; b < lines.size(); ++b) {
        // crossing of r_a - eta*c_a and r_b - eta*c_b
        const double dc = lines[a].second - lines[b].second;
        if (dc == 0.0) continue;
        const double eta = (lines[a].first - lines[b].first) / dc;
        if (eta >= 0.0 && std::isfinite(eta)) candidates.push_back(eta);
      }
    }
  }

  double best_eta = 0.0;
  double best_val = kInf;
  for (double eta : candidates) {
    const double v = dual_objective(losses, cost, eps, eta);
    if (v < best_val - 0.0 || (v == best_val && eta < best_eta)) {
      best_val = v;
      best_eta = eta;
    }
  }

  DualSolution sol;
  sol.eta = best_eta;
  sol.dual_value = best_val;
  bool fell_back = false;
  sol.plan = recover_primal_exact(losses, cost, eps, best_eta, &fell_back);
  sol.heuristic_fallback = fell_back;
  sol.primal_value = worst_case_loss(losses, sol.plan);
  sol.plan_cost = plan_cost(cost, sol.plan);
  sol.budget_exceeded = sol.plan_cost > eps * (1.0 + 1e-6) + 1e-12;
  // Weak duality makes equality a certificate of exact optimality for both
  // the plan and the corner.
  const double gap = std::abs(sol.dual_value - sol.primal_value);
  if (fell_back || gap > 1e-9 * (1.0 + std::abs(sol.dual_value))) {
    throw SolverError("corner oracle failed to certify optimality (gap " +
                      format_double(gap) + ")");
  }
  return sol;
}

DualSolution solve_dual_sgd(const LossColumns& losses, const CostMatrix& cost,
                            const SolverConfig& cfg) {
  const std::size_t n = losses.n();
  if (cfg.batch_size == 0) throw ConfigError("solve_dual_sgd: batch_size must be > 0");
  const bool full_batch = cfg.batch_size >= n;
  const std::size_t batch = full_batch ? n : cfg.batch_size;

  Rng rng(cfg.seed);
  double eta = std::max(0.0, cfg.eta0);
  double velocity = 0.0;
  std::size_t small_moves = 0;
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    double csum = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t j = full_batch ? b : rng.uniform_int(n);
      csum += column_argmax(losses, cost, j, eta).cost;
    }
    const double grad = cfg.epsilon - csum / static_cast<double>(batch);
    velocity = cfg.momentum * velocity + grad;
    const double alpha = cfg.alpha0 / std::sqrt(static_cast<double>(t));
    const double next = std::max(0.0, eta - alpha * velocity);
    small_moves = std::abs(next - eta) < cfg.tol ? small_moves + 1 : 0;
    eta = next;
    if (small_moves >= 10) break;
  }

  DualSolution sol;
  sol.eta = eta;
  sol.plan = recover_primal_heuristic(losses, cost, eta, cfg.seed + 1);
  sol.heuristic_fallback = true;
  sol.dual_value = dual_objective(losses, cost, cfg.epsilon, eta);
  sol.primal_value = worst_case_loss(losses, sol.plan);
  sol.plan_cost = plan_cost(cost, sol.plan);
  sol.budget_exceeded = sol.plan_cost > cfg.epsilon * (1.0 + 1e-6) + 1e-12;
  return sol;
}

namespace {

// Per-column log-space softmax quantities of exp((R_ij - eta*C_ij)/gamma).
struct SoftColumn {
  double norm;       // sum of exp(a_i - a_max)
  double avg_cost;   // softmax-weighted mean of C_ij
  double a_max;
};

SoftColumn soft_column(const LossColumns& losses, const CostMatrix& cost,
                       std::size_t j, double gamma, double eta) {
  double a_max = -kInf;
  for_each_admissible(cost, j, [&](std::size_t i, double c) {
    a_max = std::max(a_max, (losses.at(i, j) - eta * c) / gamma);
  });
  double s = 0.0, cs = 0.0;
  for_each_admissible(cost, j, [&](std::size_t i, double c) {
    const double e = std::exp((losses.at(i, j) - eta * c) / gamma - a_max);
    s += e;
    cs += c * e;
  });
  if (!std::isfinite(s) || s <= 0.0) {
    throw SolverError("entropic column normalizer not finite (gamma too small?)");
  }
  return {s, cs / s, a_max};
}

TransportPlan entropic_plan(const LossColumns& losses, const CostMatrix& cost,
                            double gamma, double eta) {
  const std::size_t n = losses.n();
  const double w = 1.0 / static_cast<double>(n);
  TransportPlan plan;
  plan.n = n;
  plan.columns.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto sc = soft_column(losses, cost, j, gamma, eta);
    auto& col = plan.columns[j];
    for_each_admissible(cost, j, [&](std::size_t i, double c) {
      const double e = std::exp((losses.at(i, j) - eta * c) / gamma - sc.a_max);
      col.push_back({static_cast<std::uint32_t>(i), w * (e / sc.norm)});
    });
  }
  return plan;
}

}  // namespace

double sinkhorn_objective(const LossColumns& losses, const CostMatrix& cost,
                          double eps, double gamma, double eta) {
  if (gamma <= 0.0) throw ConfigError("sinkhorn_objective: gamma must be > 0");
  if (eta < 0.0) throw ConfigError("sinkhorn_objective: eta must be >= 0");
  const std::size_t n = losses.n();
  double total_cost = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    total_cost += soft_column(losses, cost, j, gamma, eta).avg_cost;
  }
  return eps - total_cost / static_cast<double>(n);
}

TransportPlan solve_entropic(const LossColumns& losses, const CostMatrix& cost,
                             double eps, double gamma, double root_tol,
                             double* eta_out) {
  if (gamma <= 0.0) throw ConfigError("solve_entropic: gamma must be > 0");
  const auto m = [&](double eta) {
    return sinkhorn_objective(losses, cost, eps, gamma, eta);
  };
  if (m(0.0) >= 0.0) {
    if (eta_out) *eta_out = 0.0;
    return entropic_plan(losses, cost, gamma, 0.0);
  }
  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (m(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) {
      throw SolverError("solve_entropic: no root of the budget equation within "
                        "2^60 bracket expansions");
    }
  }
  // m is nondecreasing in eta; keep the plan on the hi side so the budget is
  // never exceeded.
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= root_tol * std::max(1.0, hi)) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (m(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (eta_out) *eta_out = hi;
  return entropic_plan(losses, cost, gamma, hi);
}

TransportPlan solve_entropic_sgd(const LossColumns& losses, const CostMatrix& cost,
                                 const SolverConfig& cfg, double* eta_out) {
  const std::size_t n = losses.n();
  if (cfg.batch_size == 0)
    throw ConfigError("solve_entropic_sgd: batch_size must be > 0");
  double gamma = cfg.gamma;
  if (gamma <= 0.0) {
    double r_min = kInf, r_max = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
      r_min = std::min({r_min, losses.r0[i], losses.r1[i]});
      r_max = std::max({r_max, losses.r0[i], losses.r1[i]});
    }
    gamma = 0.01 * std::max(r_max - r_min, 1e-12);
  }
  const bool full_batch = cfg.batch_size >= n;
  const std::size_t batch = full_batch ? n : cfg.batch_size;

  Rng rng(cfg.seed);
  double eta = std::max(0.0, cfg.eta0);
  double velocity = 0.0;
  std::size_t small_moves = 0;
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    double csum = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t j = full_batch ? b : rng.uniform_int(n);
      csum += soft_column(losses, cost, j, gamma, eta).avg_cost;
    }
    const double grad = cfg.epsilon - csum / static_cast<double>(batch);
    velocity = cfg.momentum * velocity + grad;
    const double alpha = cfg.alpha0 / std::sqrt(static_cast<double>(t));
    const double next = std::max(0.0, eta - alpha * velocity);
    small_moves = std::abs(next - eta) < cfg.tol ? small_moves + 1 : 0;
    eta = next;
    if (small_moves >= 10) break;
  }
  if (eta_out) *eta_out = eta;
  return entropic_plan(losses, cost, gamma, eta);
}

std::vector<double> plan_marginals(const TransportPlan& plan,
                                   const std::vector<int>& labels) {
  const std::size_t n = plan.n;
  if (labels.size() != n) throw DataError("plan_marginals: label size mismatch");
  std::vector<double> w(2 * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t block = labels[j] == 1 ? n : 0;
    for (const auto& e : plan.columns[j]) w[block + e.row] += e.mass;
  }
  return w;
}

double worst_case_loss(const LossColumns& losses, const TransportPlan& plan) {
  double v = 0.0;
  for (std::size_t j = 0; j < plan.n; ++j) {
    for (const auto& e : plan.columns[j]) v += e.mass * losses.at(e.row, j);
  }
  return v;
}

double plan_cost(const CostMatrix& cost, const TransportPlan& plan) {
  double v = 0.0;
  for (std::size_t j = 0; j < plan.n; ++j) {
    for (const auto& e : plan.columns[j]) {
      if (e.mass > 0.0) v += e.mass * cost.at(e.row, j);
    }
  }
  return v;
}

}  // namespace fairboost
