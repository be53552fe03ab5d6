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
#ifndef FAIRBOOST_GBDT_HPP_
#define FAIRBOOST_GBDT_HPP_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairboost/common.hpp"

// Weighted second-order gradient boosting for binary logistic loss with
// exact greedy split search. Deterministic by construction: thresholds sit
// at midpoints of consecutive distinct values, gain ties keep the smallest
// feature index then smallest threshold, and gradient sums are accumulated
// in a canonical order so permuting the input rows cannot change the tree.

namespace fairboost {

struct BoostConfig {
  int max_depth = 6;
  double lambda = 1.0;            // leaf l2 regularization
  double min_child_weight = 0.0;  // minimum hessian sum per child
  double eta = 0.3;               // shrinkage
  double scale_pos_weight = 1.0;  // multiplies weights of label-1 examples
  double base_margin = 0.0;
};

struct TreeNode {
  int feature = -1;  // -1: leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double eval(std::span<const double> x) const {
    int cur = 0;
    while (!nodes[cur].is_leaf()) {
      cur = x[nodes[cur].feature] < nodes[cur].threshold ? nodes[cur].left
                                                         : nodes[cur].right;
    }
    return nodes[cur].value;
  }
};

struct Ensemble {
  double base_margin = 0.0;
  std::vector<std::pair<RegressionTree, double>> trees;  // (tree, eta)
  std::string loss = "logistic";

  double predict_margin(std::span<const double> x) const {
    double m = base_margin;
    for (const auto& [tree, eta] : trees) m += eta * tree.eval(x);
    return m;
  }
  /// Strict-greater convention: margin exactly at the threshold is label 0.
  int predict_label(std::span<const double> x, double threshold = 0.0) const {
    return predict_margin(x) > threshold ? 1 : 0;
  }
  /// Feature indices used by any split (consistency audits check these).
  std::set<int> split_features() const;
};

struct WeightedExamples {
  Matrix features;              // m x d
  std::vector<int> targets;     // {0,1}
  std::vector<double> weights;  // >= 0

  std::size_t size() const { return features.rows; }
};

/// log(1 + exp(margin)) - label * margin, evaluated without overflow.
double logistic_loss(double margin, int label);

/// (g, h) = (weight * (sigma(margin) - label), weight * sigma * (1 - sigma)).
std::pair<double, double> grad_hess(double margin, int label, double weight);

/// Exact greedy tree on second-order statistics at the given margins.
/// scale_pos_weight from cfg multiplies label-1 example weights.
RegressionTree fit_tree(const WeightedExamples& examples,
                        std::span<const double> margins, const BoostConfig& cfg);

/// Appends one eta-scaled tree fitted at the model's current margins.
Ensemble boost_step(const Ensemble& model, const WeightedExamples& examples,
                    const BoostConfig& cfg);

/// Same, reusing externally maintained margins (updated in place).
Ensemble boost_step_at(const Ensemble& model, const WeightedExamples& examples,
                       std::vector<double>& margins, const BoostConfig& cfg);

double weighted_logistic_loss(const WeightedExamples& examples,
                              std::span<const double> margins,
                              double scale_pos_weight = 1.0);

}  // namespace fairboost

#endif  // FAIRBOOST_GBDT_HPP_
