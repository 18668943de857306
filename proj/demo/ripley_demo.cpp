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

// Global RVM vs the localized variant on two-cluster synthetic data:
// trains both, then compares sparsity and per-query training effort.

#include <algorithm>
#include <iostream>
#include <vector>

#include "lrvm/lrvm.hpp"

int main() {
  const lrvm::Dataset data = lrvm::gen_ripley(125, 42);
  const double gamma = 0.5;

  const lrvm::GlobalRvmModels global = lrvm::fit_global_rvm(data, gamma);
  std::cout << "global RVM: " << global.models[0].relevance_count() << " RVs, "
            << global.reports[0].outer_iterations << " outer iterations\n";

  const lrvm::GramTable table = lrvm::build_gram(data.features, gamma);
  lrvm::LrvmConfig config;
  config.k = 7;
  config.gamma = gamma;

  const lrvm::Dataset probes = lrvm::gen_ripley(50, 43);
  std::vector<int> iterations;
  std::vector<int> sizes;
  int correct = 0;
  for (Eigen::Index i = 0; i < probes.size(); ++i) {
    const lrvm::LocalPrediction pred =
        lrvm::classify_local(probes.features.row(i), data, table, config);
    iterations.push_back(pred.iterations);
    sizes.push_back(pred.lrv_count);
    if (pred.predicted_class == probes.labels[static_cast<std::size_t>(i)]) ++correct;
  }

  const auto median = [](std::vector<int> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  std::cout << "localized (k=" << config.k << "): median " << median(iterations)
            << " iterations, median " << median(sizes) << " LRVs per query\n";
  std::cout << "holdout accuracy: "
            << static_cast<double>(correct) / static_cast<double>(probes.size())
            << '\n';
  return 0;
}
