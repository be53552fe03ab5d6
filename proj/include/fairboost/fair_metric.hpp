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
#ifndef FAIRBOOST_FAIR_METRIC_HPP_
#define FAIRBOOST_FAIR_METRIC_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fairboost/common.hpp"
#include "fairboost/dataset.hpp"

namespace fairboost {

/// Directions spanning the sensitive subspace: indicator vectors of the
/// protected columns plus normal vectors of linear models fitted to predict
/// each protected attribute from the remaining features.
struct SensitiveDirections {
  std::vector<std::vector<double>> directions;  // each length d, unit norm
};

/// Coefficients of a linear model predicting one protected column from all
/// others, re-embedded into full feature space with 0 at the target index.
struct LinearDirection {
  std::vector<double> weights;
  double intercept = 0.0;
};

/// The seminorm projector: Q = I - proj(span of sensitive directions).
/// Distances measured through Q ignore all variation inside the sensitive
/// subspace.
struct ProjectionMetric {
  Matrix q;  // d x d, symmetric, idempotent

  std::size_t dim() const { return q.rows; }
};

/// Pairwise squared fair distances, dense or restricted to neighbor lists
/// with cost below a cutoff (the diagonal entry is always kept).
struct CostMatrix {
  enum class Mode { kDense, kNeighborSparse };

  struct Entry {
    std::uint32_t row;
    double cost;
  };

  Mode mode = Mode::kDense;
  std::size_t n = 0;
  Matrix dense;                             // n x n when dense
  std::vector<std::vector<Entry>> columns;  // per-column entries when sparse
  double tau = std::numeric_limits<double>::infinity();

  bool is_dense() const { return mode == Mode::kDense; }
  double at(std::size_t i, std::size_t j) const;  // dense lookup / sparse search
};

/// L2-regularized logistic regression of a binary protected column on all
/// remaining columns. Damped Newton with step halving; converges to gradient
/// norm 1e-6 or throws SolverError after 500 iterations.
LinearDirection fit_logistic_direction(const Dataset& data,
                                       const std::string& target_protected,
                                       double l2_strength);

/// Closed-form ridge regression of a numeric protected column on all
/// remaining columns; the penalty is chosen from `l2_grid` by 5-fold
/// cross-validated squared error (fixed fold seed).
LinearDirection fit_ridge_direction(const Dataset& data,
                                    const std::string& target_protected,
                                    const std::vector<double>& l2_grid);

/// Q = I - U U^T for an orthonormal basis U of the span of the directions.
/// Near-collinear directions (residual below 1e-10 after projection onto the
/// earlier ones) are dropped; all-zero directions are an error.
ProjectionMetric build_projection(const SensitiveDirections& directions);

/// ||Q (x1 - x2)||_2
double fair_distance(const ProjectionMetric& metric, std::span<const double> x1,
                     std::span<const double> x2);

ProjectionMetric metric_identity(std::size_t dim);

CostMatrix build_cost_matrix(const ProjectionMetric& metric, const Dataset& data,
                             CostMatrix::Mode mode,
                             double tau = std::numeric_limits<double>::infinity(),
                             int threads = 1);

/// Assembles the sensitive subspace for every protected attribute of the
/// dataset: indicators of the attribute's encoded columns plus a fitted
/// direction (logistic for binary columns, ridge for numeric ones).
struct MetricFitOptions {
  double logistic_l2 = 0.1;
  std::vector<double> ridge_grid = {0.1, 1.0, 10.0};
  bool fit_linear_directions = true;
};

SensitiveDirections sensitive_directions_for(const Dataset& data,
                                             const MetricFitOptions& opts);

}  // namespace fairboost

#endif  // FAIRBOOST_FAIR_METRIC_HPP_
