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
#ifndef FAIRBOOST_BASELINES_HPP_
#define FAIRBOOST_BASELINES_HPP_

#include <vector>

#include "fairboost/dataset.hpp"
#include "fairboost/fair_metric.hpp"

namespace fairboost {

/// Replaces every feature row x by Qx, removing all variation inside the
/// sensitive subspace; metadata is preserved. Idempotent.
Dataset project_preprocess(const Dataset& data, const ProjectionMetric& metric);

/// Group reweighing: weight for cell (g, y) is P(g) * P(y) / P(g, y) on
/// empirical frequencies, making group and label uncorrelated under the
/// weighted measure. All four cells must be populated.
std::vector<double> reweigh_weights(const Dataset& data,
                                    const std::vector<int>& group);

}  // namespace fairboost

#endif  // FAIRBOOST_BASELINES_HPP_
