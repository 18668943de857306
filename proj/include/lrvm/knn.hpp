/*
 * Copyright 2026 the lrvm authors.
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
#ifndef LRVM_KNN_HPP_
#define LRVM_KNN_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lrvm/common.hpp"
#include "lrvm/dataset.hpp"
#include "lrvm/local.hpp"

namespace lrvm {

/// Majority vote over the k nearest training rows. Vote ties go to the
/// class with the smaller summed Euclidean distance to x, then to the
/// smaller class id.
inline int knn_classify(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                        const Dataset& data, int k) {
  if (k < 1 || k > data.size())
    throw std::invalid_argument("knn_classify: k out of range");
  const auto order = neighbor_order(x, data.features);

  std::vector<int> votes(static_cast<std::size_t>(data.class_count), 0);
  std::vector<double> dist_sum(static_cast<std::size_t>(data.class_count), 0.0);
  for (int i = 0; i < k; ++i) {
    const auto c =
        static_cast<std::size_t>(data.labels[static_cast<std::size_t>(order[i].second)]);
    ++votes[c];
    dist_sum[c] += std::sqrt(order[static_cast<std::size_t>(i)].first);
  }

  int best = -1;
  for (int c = 0; c < data.class_count; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    if (votes[cc] == 0) continue;
    if (best < 0) {
      best = c;
      continue;
    }
    const auto bb = static_cast<std::size_t>(best);
    if (votes[cc] > votes[bb] ||
        (votes[cc] == votes[bb] && dist_sum[cc] < dist_sum[bb]))
      best = c;
  }
  return best;
}

}  // namespace lrvm

#endif  // LRVM_KNN_HPP_
