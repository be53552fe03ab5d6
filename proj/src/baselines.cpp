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
#include "fairboost/baselines.hpp"

#include <string>

namespace fairboost {

Dataset project_preprocess(const Dataset& data, const ProjectionMetric& metric) {
  const std::size_t d = data.dim();
  if (metric.dim() != d) throw DataError("project_preprocess: dimension mismatch");
  Dataset out = data;
  for (std::size_t r = 0; r < data.n(); ++r) {
    const auto src = data.features.row(r);
    auto dst = out.features.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += metric.q(i, j) * src[j];
      dst[i] = acc;
    }
  }
  return out;
}

std::vector<double> reweigh_weights(const Dataset& data,
                                    const std::vector<int>& group) {
  const std::size_t n = data.n();
  if (group.size() != n) throw DataError("reweigh_weights: group size mismatch");
  std::size_t cell[2][2] = {{0, 0}, {0, 0}};
  std::size_t n_g[2] = {0, 0};
  std::size_t n_y[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const int g = group[i] == 1 ? 1 : 0;
    const int y = data.labels[i] == 1 ? 1 : 0;
    ++cell[g][y];
    ++n_g[g];
    ++n_y[y];
  }
  double w_cell[2][2];
  for (int g = 0; g < 2; ++g) {
    for (int y = 0; y < 2; ++y) {
      if (cell[g][y] == 0)
        throw DataError("reweigh_weights: empty (g=" + std::to_string(g) +
                        ", y=" + std::to_string(y) + ") cell");
      w_cell[g][y] = (static_cast<double>(n_g[g]) * static_cast<double>(n_y[y])) /
                     (static_cast<double>(n) * static_cast<double>(cell[g][y]));
    }
  }
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = w_cell[group[i] == 1 ? 1 : 0][data.labels[i] == 1 ? 1 : 0];
  }
  return weights;
}

}  // namespace fairboost
