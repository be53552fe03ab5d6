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
#include "fairboost/gbdt.hpp"

#include <algorithm>
#include <cmath>

namespace fairboost {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct GradHess {
  double g;
  double h;
};

// Sums in a canonical order so the result is independent of row order.
GradHess canonical_sum(const std::vector<GradHess>& gh,
                       std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (gh[a].g != gh[b].g) return gh[a].g < gh[b].g;
    return gh[a].h < gh[b].h;
  });
  GradHess total{0.0, 0.0};
  for (std::size_t i : idx) {
    total.g += gh[i].g;
    total.h += gh[i].h;
  }
  return total;
}

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double leaf_score(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? g * g / denom : 0.0;
}

class TreeBuilder {
 public:
  TreeBuilder(const WeightedExamples& ex, const std::vector<GradHess>& gh,
              const BoostConfig& cfg)
      : ex_(ex), gh_(gh), cfg_(cfg) {}

  RegressionTree build() {
    std::vector<std::size_t> all(ex_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    tree_.nodes.clear();
    grow(std::move(all), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t> idx, int depth) {
    const GradHess total = canonical_sum(gh_, idx);
    const int node_id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    {
      const double denom = total.h + cfg_.lambda;
      tree_.nodes[node_id].value = denom > 0.0 ? -total.g / denom : 0.0;
    }
    if (depth >= cfg_.max_depth || idx.size() < 2) return node_id;

    const SplitCandidate best = find_split(idx, total);
    if (!best.found) return node_id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (ex_.features(i, best.feature) < best.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    tree_.nodes[node_id].feature = best.feature;
    tree_.nodes[node_id].threshold = best.threshold;
    tree_.nodes[node_id].left = l;
    tree_.nodes[node_id].right = r;
    return node_id;
  }

  SplitCandidate find_split(const std::vector<std::size_t>& idx,
                            const GradHess& total) const {
    SplitCandidate best;
    const double parent = leaf_score(total.g, total.h, cfg_.lambda);
    std::vector<std::size_t> order(idx);
    const std::size_t d = ex_.features.cols;
    for (std::size_t f = 0; f < d; ++f) {
      // Sort order is a total order (value, g, h, index); equal (value,g,h)
      // rows are interchangeable, which keeps prefix sums permutation-proof.
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = ex_.features(a, f), vb = ex_.features(b, f);
        if (va != vb) return va < vb;
        if (gh_[a].g != gh_[b].g) return gh_[a].g < gh_[b].g;
        if (gh_[a].h != gh_[b].h) return gh_[a].h < gh_[b].h;
        return a < b;
      });
      double gl = 0.0, hl = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        gl += gh_[order[k]].g;
        hl += gh_[order[k]].h;
        const double v = ex_.features(order[k], f);
        const double v_next = ex_.features(order[k + 1], f);
        if (v == v_next) continue;
        const double gr = total.g - gl;
        const double hr = total.h - hl;
        if (hl < cfg_.min_child_weight || hr < cfg_.min_child_weight) continue;
        const double gain = 0.5 * (leaf_score(gl, hl, cfg_.lambda) +
                                   leaf_score(gr, hr, cfg_.lambda) - parent);
        if (gain > 0.0 && (!best.found || gain > best.gain)) {
          best.found = true;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (v + v_next);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  const WeightedExamples& ex_;
  const std::vector<GradHess>& gh_;
  const BoostConfig& cfg_;
  RegressionTree tree_;
};

std::vector<GradHess> gradients(const WeightedExamples& ex,
                                std::span<const double> margins,
                                const BoostConfig& cfg) {
  std::vector<GradHess> gh(ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const double w =
        ex.weights[i] * (ex.targets[i] == 1 ? cfg.scale_pos_weight : 1.0);
    const auto [g, h] = grad_hess(margins[i], ex.targets[i], w);
    gh[i] = {g, h};
  }
  return gh;
}

}  // namespace

std::set<int> Ensemble::split_features() const {
  std::set<int> used;
  for (const auto& [tree, eta] : trees) {
    (void)eta;
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) used.insert(node.feature);
    }
  }
  return used;
}

double logistic_loss(double margin, int label) {
  const double softplus = margin > 0.0 ? margin + std::log1p(std::exp(-margin))
                                       : std::log1p(std::exp(margin));
  return softplus - (label == 1 ? margin : 0.0);
}

std::pair<double, double> grad_hess(double margin, int label, double weight) {
  if (weight < 0.0) throw DataError("grad_hess: negative weight");
  if (weight == 0.0) return {0.0, 0.0};
  const double s = sigmoid(margin);
  return {weight * (s - (label == 1 ? 1.0 : 0.0)), weight * s * (1.0 - s)};
}

RegressionTree fit_tree(const WeightedExamples& examples,
                        std::span<const double> margins, const BoostConfig& cfg) {
  if (examples.size() == 0) throw DataError("fit_tree: no examples");
  if (margins.size() != examples.size())
    throw DataError("fit_tree: margin size mismatch");
  const auto gh = gradients(examples, margins, cfg);
  return TreeBuilder(examples, gh, cfg).build();
}

Ensemble boost_step_at(const Ensemble& model, const WeightedExamples& examples,
                       std::vector<double>& margins, const BoostConfig& cfg) {
  RegressionTree tree = fit_tree(examples, margins, cfg);
  Ensemble next = model;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    margins[i] += cfg.eta * tree.eval(examples.features.row(i));
  }
  next.trees.emplace_back(std::move(tree), cfg.eta);
  return next;
}

Ensemble boost_step(const Ensemble& model, const WeightedExamples& examples,
                    const BoostConfig& cfg) {
  std::vector<double> margins(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    margins[i] = model.predict_margin(examples.features.row(i));
  }
  return boost_step_at(model, examples, margins, cfg);
}

double weighted_logistic_loss(const WeightedExamples& examples,
                              std::span<const double> margins,
                              double scale_pos_weight) {
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const double w =
        examples.weights[i] * (examples.targets[i] == 1 ? scale_pos_weight : 1.0);
    total += w * logistic_loss(margins[i], examples.targets[i]);
  }
  return total;
}

}  // namespace fairboost
