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
#include "fairboost/fair_metric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

namespace fairboost {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMatrix = Eigen::Map<const RowMajorMatrix>;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

const std::vector<std::size_t>& protected_indices(const Dataset& data,
                                                  const std::string& name) {
  const auto it = data.protected_columns.find(name);
  if (it == data.protected_columns.end() || it->second.empty())
    throw DataError("unknown protected attribute '" + name + "'");
  return it->second;
}

// Feature matrix with the given columns removed, plus the map back to full
// indices.
std::pair<Eigen::MatrixXd, std::vector<std::size_t>> drop_columns(
    const Dataset& data, const std::set<std::size_t>& excluded) {
  const std::size_t n = data.n(), d = data.dim();
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < d; ++c)
    if (!excluded.count(c)) keep.push_back(c);
  Eigen::MatrixXd x(n, keep.size());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < keep.size(); ++k) x(r, k) = data.features(r, keep[k]);
  return {std::move(x), std::move(keep)};
}

LinearDirection embed(const Eigen::VectorXd& w, const std::vector<std::size_t>& keep,
                      std::size_t d, double intercept) {
  LinearDirection dir;
  dir.weights.assign(d, 0.0);
  for (std::size_t k = 0; k < keep.size(); ++k) dir.weights[keep[k]] = w(k);
  dir.intercept = intercept;
  for (double v : dir.weights)
    if (!std::isfinite(v)) throw SolverError("linear direction has non-finite weights");
  return dir;
}

// Binary 0/1 vector out of one encoded column; columns carrying two distinct
// values (e.g. a standardized binary numeric) are relabeled, anything else is
// rejected.
std::vector<double> binary_targets(const Dataset& data, std::size_t col,
                                   const std::string& name) {
  std::set<double> distinct;
  for (std::size_t r = 0; r < data.n(); ++r) distinct.insert(data.features(r, col));
  if (distinct.size() > 2)
    throw DataError("protected attribute '" + name + "' is not binary");
  const double hi = *distinct.rbegin();
  std::vector<double> y(data.n());
  for (std::size_t r = 0; r < data.n(); ++r)
    y[r] = (distinct.size() == 2 && data.features(r, col) == hi) ? 1.0 : 0.0;
  return y;
}

}  // namespace

LinearDirection fit_logistic_direction(const Dataset& data,
                                       const std::string& target_protected,
                                       double l2_strength) {
  if (l2_strength < 0.0) throw ConfigError("logistic: l2_strength must be >= 0");
  const auto& cols = protected_indices(data, target_protected);
  if (cols.size() > 2)
    throw DataError("logistic: protected attribute '" + target_protected +
                    "' is not binary");
  // For a one-hot pair the two columns are complementary; predict the second
  // level and exclude both from the features.
  const std::size_t target_col = cols.size() == 2 ? cols[1] : cols[0];
  const auto y = binary_targets(data, target_col, target_protected);
  auto [x, keep] = drop_columns(data, std::set<std::size_t>(cols.begin(), cols.end()));

  const std::size_t n = data.n();
  const Eigen::Index p = x.cols();
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  // Augmented parameter vector [w; b]; the intercept is not penalized.
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);

  auto objective = [&](const Eigen::VectorXd& th) {
    const Eigen::VectorXd m = x * th.head(p) + Eigen::VectorXd::Constant(n, th(p));
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) f += softplus(m(i)) - y[i] * m(i);
    f /= static_cast<double>(n);
    f += 0.5 * l2_strength * th.head(p).squaredNorm();
    return f;
  };

  double f_cur = objective(theta);
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::VectorXd m = x * theta.head(p) + Eigen::VectorXd::Constant(n, theta(p));
    Eigen::VectorXd s(n), wdiag(n);
    for (std::size_t i = 0; i < n; ++i) {
      s(i) = sigmoid(m(i));
      wdiag(i) = std::max(s(i) * (1.0 - s(i)), 1e-12);
    }
    Eigen::VectorXd grad(p + 1);
    grad.head(p) = x.transpose() * (s - yv) / static_cast<double>(n) +
                   l2_strength * theta.head(p);
    grad(p) = (s - yv).mean();
    if (grad.norm() <= 1e-6) {
      return embed(theta.head(p), keep, data.dim(), theta(p));
    }
    Eigen::MatrixXd h(p + 1, p + 1);
    h.topLeftCorner(p, p) =
        x.transpose() * wdiag.asDiagonal() * x / static_cast<double>(n) +
        l2_strength * Eigen::MatrixXd::Identity(p, p);
    h.topRightCorner(p, 1) = x.transpose() * wdiag / static_cast<double>(n);
    h.bottomLeftCorner(1, p) = h.topRightCorner(p, 1).transpose();
    h(p, p) = wdiag.mean();
    const Eigen::VectorXd step = h.ldlt().solve(grad);
    double scale = 1.0;
    for (int halving = 0; halving < 60; ++halving) {
      const Eigen::VectorXd cand = theta - scale * step;
      const double f_cand = objective(cand);
      if (f_cand <= f_cur) {
        theta = cand;
        f_cur = f_cand;
        break;
      }
      scale *= 0.5;
    }
  }
  throw SolverError("logistic direction fit did not converge in 500 iterations");
}

LinearDirection fit_ridge_direction(const Dataset& data,
                                    const std::string& target_protected,
                                    const std::vector<double>& l2_grid) {
  if (l2_grid.empty()) throw ConfigError("ridge: l2 grid must be non-empty");
  const auto& cols = protected_indices(data, target_protected);
  if (cols.size() != 1)
    throw DataError("ridge: protected attribute '" + target_protected +
                    "' must be a single numeric column");
  const std::size_t target_col = cols[0];
  auto [x, keep] = drop_columns(data, {target_col});
  const std::size_t n = data.n();
  const Eigen::Index p = x.cols();
  Eigen::VectorXd y(n);
  for (std::size_t r = 0; r < n; ++r) y(r) = data.features(r, target_col);

  auto fit = [&](const std::vector<std::size_t>& rows, double lambda)
      -> std::pair<Eigen::VectorXd, double> {
    Eigen::MatrixXd xr(rows.size(), p);
    Eigen::VectorXd yr(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      xr.row(k) = x.row(rows[k]);
      yr(k) = y(rows[k]);
    }
    const Eigen::RowVectorXd x_mean = xr.colwise().mean();
    const double y_mean = yr.mean();
    xr.rowwise() -= x_mean;
    yr.array() -= y_mean;
    Eigen::MatrixXd gram = xr.transpose() * xr;
    if (lambda == 0.0) {
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
      if (!lu.isInvertible())
        throw ConfigError(
            "ridge: singular system at lambda=0 (collinear features); "
            "supply lambda > 0");
    }
    gram.diagonal().array() += lambda;
    const Eigen::VectorXd w = gram.ldlt().solve(xr.transpose() * yr);
    return {w, y_mean - x_mean.dot(w)};
  };

  // 5-fold CV with a fixed shuffle.
  const std::size_t folds = std::min<std::size_t>(5, n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(0x9d5c0f1b);
  rng.shuffle(order);

  double best_lambda = l2_grid[0];
  double best_score = std::numeric_limits<double>::infinity();
  for (double lambda : l2_grid) {
    double sse = 0.0;
    std::size_t count = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_rows, val_rows;
      for (std::size_t k = 0; k < n; ++k)
        (k % folds == f ? val_rows : train_rows).push_back(order[k]);
      if (train_rows.empty() || val_rows.empty()) continue;
      const auto [w, b] = fit(train_rows, lambda);
      for (std::size_t r : val_rows) {
        const double res = y(r) - (x.row(r).dot(w) + b);
        sse += res * res;
        ++count;
      }
    }
    const double score = sse / static_cast<double>(std::max<std::size_t>(count, 1));
    if (score < best_score) {
      best_score = score;
      best_lambda = lambda;
    }
  }

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const auto [w, b] = fit(all, best_lambda);
  return embed(w, keep, data.dim(), b);
}

ProjectionMetric build_projection(const SensitiveDirections& directions) {
  if (directions.directions.empty())
    throw ConfigError("build_projection: no directions given");
  const std::size_t d = directions.directions.front().size();

  std::vector<Eigen::VectorXd> basis;
  for (const auto& raw : directions.directions) {
    if (raw.size() != d) throw DataError("build_projection: dimension mismatch");
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(raw.data(), d);
    const double norm = v.norm();
    if (!(norm > 1e-12) || !v.allFinite())
      throw DataError("build_projection: degenerate (all-zero) direction");
    v /= norm;
    // Two orthogonalization passes keep the basis orthonormal to machine
    // precision even for nearly collinear inputs.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : basis) v -= u.dot(v) * u;
    }
    const double res = v.norm();
    if (res < 1e-10) continue;  // inside the accumulated span
    basis.push_back(v / res);
  }

  ProjectionMetric metric;
  metric.q = Matrix(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double uut = 0.0;
      for (const auto& u : basis) uut += u(i) * u(j);
      const double q = (i == j ? 1.0 : 0.0) - uut;
      metric.q(i, j) = q;
      metric.q(j, i) = q;
    }
  }
  return metric;
}

ProjectionMetric metric_identity(std::size_t dim) {
  ProjectionMetric m;
  m.q = Matrix::identity(dim);
  return m;
}

double fair_distance(const ProjectionMetric& metric, std::span<const double> x1,
                     std::span<const double> x2) {
  const std::size_t d = metric.dim();
  if (x1.size() != d || x2.size() != d)
    throw DataError("fair_distance: dimension mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += metric.q(i, j) * (x1[j] - x2[j]);
    sq += acc * acc;
  }
  return std::sqrt(sq);
}

CostMatrix build_cost_matrix(const ProjectionMetric& metric, const Dataset& data,
                             CostMatrix::Mode mode, double tau, int threads) {
  const std::size_t n = data.n();
  const std::size_t d = data.dim();
  if (metric.dim() != d) throw DataError("build_cost_matrix: dimension mismatch");
  if (mode == CostMatrix::Mode::kNeighborSparse && !(tau > 0.0))
    throw ConfigError("build_cost_matrix: tau must be > 0 in sparse mode");

  // Q is idempotent, so the squared fair distance is the squared Euclidean
  // distance between projected rows.
  MapMatrix x(data.features.data.data(), n, d);
  MapMatrix q(metric.q.data.data(), d, d);
  RowMajorMatrix projected = x * q;

  Matrix dense(n, n, 0.0);
  auto fill_rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double c = (projected.row(i) - projected.row(j)).squaredNorm();
        dense(i, j) = c;
        dense(j, i) = c;
      }
    }
  };
  if (threads > 1 && n > 64) {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(n, t * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(fill_rows, begin, end);
    }
    for (auto& th : pool) th.join();
  } else {
    fill_rows(0, n);
  }

  CostMatrix cost;
  cost.n = n;
  cost.mode = mode;
  cost.tau = tau;
  if (mode == CostMatrix::Mode::kDense) {
    cost.dense = std::move(dense);
    return cost;
  }
  cost.columns.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto& col = cost.columns[j];
    for (std::size_t i = 0; i < n; ++i) {
      const double c = dense(i, j);
      if (i == j || c <= tau) col.push_back({static_cast<std::uint32_t>(i), c});
    }
  }
  return cost;
}

SensitiveDirections sensitive_directions_for(const Dataset& data,
                                             const MetricFitOptions& opts) {
  SensitiveDirections dirs;
  const std::size_t d = data.dim();
  for (const auto& [name, cols] : data.protected_columns) {
    for (std::size_t c : cols) {
      std::vector<double> e(d, 0.0);
      e[c] = 1.0;
      dirs.directions.push_back(std::move(e));
    }
    if (!opts.fit_linear_directions) continue;
    if (cols.size() == 2) {
      dirs.directions.push_back(
          fit_logistic_direction(data, name, opts.logistic_l2).weights);
    } else if (cols.size() == 1) {
      std::set<double> distinct;
      for (std::size_t r = 0; r < data.n() && distinct.size() < 3; ++r)
        distinct.insert(data.features(r, cols[0]));
      if (distinct.size() <= 2) {
        dirs.directions.push_back(
            fit_logistic_direction(data, name, opts.logistic_l2).weights);
      } else {
        dirs.directions.push_back(
            fit_ridge_direction(data, name, opts.ridge_grid).weights);
      }
    }
    // Attributes spread over 3+ one-hot columns keep their indicators only.
  }
  if (dirs.directions.empty())
    throw DataError("no protected attributes to build a metric from");
  return dirs;
}

}  // namespace fairboost
