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
#ifndef LRVM_EVAL_HPP_
#define LRVM_EVAL_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "lrvm/common.hpp"
#include "lrvm/dataset.hpp"

namespace lrvm {

/// Per-model / per-query cost counters accumulated while fitting and
/// predicting (relevance-vector counts and trainer iterations).
struct FitPredictStats {
  double model_size_sum = 0.0;
  double iteration_sum = 0.0;
  std::size_t samples = 0;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(const Dataset& train) = 0;
  virtual std::vector<int> predict(const RowMatrix& X) = 0;
  virtual FitPredictStats stats() const { return {}; }
};

using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;
using FamilyFactory =
    std::function<std::unique_ptr<Classifier>(int k, double gamma)>;

struct GridSpec {
  std::vector<int> k_values;
  std::vector<double> gamma_values;
};

/// gamma grid 2^-3 .. 2^6.
inline std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int e = -3; e <= 6; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

/// Neighborhood sizes 1..71 (odd and even) with the default gamma grid.
inline GridSpec lrvm_default_grid() {
  GridSpec grid;
  for (int k = 1; k <= 71; ++k) grid.k_values.push_back(k);
  grid.gamma_values = default_gamma_grid();
  return grid;
}

/// Odd k in 1..71; gamma is a placeholder the family ignores.
inline GridSpec knn_default_grid() {
  GridSpec grid;
  for (int k = 1; k <= 71; k += 2) grid.k_values.push_back(k);
  grid.gamma_values = {1.0};
  return grid;
}

struct CvResult {
  RowMatrix fold_accuracy;  // runs x folds
  double mean_accuracy = 0.0;
  int k = 0;
  double gamma = 0.0;
  double mean_model_size = 0.0;
  double mean_iterations = 0.0;
  double wall_seconds = 0.0;
};

/// Equality over everything except wall_seconds, which depends on the
/// machine rather than on (data, seed).
inline bool payload_equal(const CvResult& a, const CvResult& b) {
  return a.fold_accuracy.rows() == b.fold_accuracy.rows() &&
         a.fold_accuracy.cols() == b.fold_accuracy.cols() &&
         a.fold_accuracy == b.fold_accuracy &&
         a.mean_accuracy == b.mean_accuracy && a.k == b.k &&
         a.gamma == b.gamma && a.mean_model_size == b.mean_model_size &&
         a.mean_iterations == b.mean_iterations;
}

/// Repeated stratified cross-validation. For run r the fold plan is seeded
/// with mix_seed(seed, r); z-score statistics are fit on the training folds
/// only and applied to both sides of the split. Classifier exceptions
/// propagate and abort the whole evaluation.
inline CvResult run_cv(const ClassifierFactory& factory, const Dataset& data,
                       int runs, int folds, std::uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("run_cv: runs must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  CvResult result;
  result.fold_accuracy.resize(runs, folds);
  FitPredictStats totals;

  for (int r = 0; r < runs; ++r) {
    const FoldPlan plan =
        stratified_kfold(data, folds, mix_seed(seed, static_cast<std::uint64_t>(r)));
    for (int f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_rows;
      std::vector<std::size_t> test_rows;
      for (std::size_t i = 0; i < plan.assignments.size(); ++i)
        (plan.assignments[i] == f ? test_rows : train_rows).push_back(i);

      Dataset train = dataset_subset(data, train_rows);
      Dataset test = dataset_subset(data, test_rows);
      const NormStats norm = zscore_fit(train);
      train.features = zscore_apply(norm, train.features);
      test.features = zscore_apply(norm, test.features);

      auto classifier = factory();
      classifier->fit(train);
      const std::vector<int> pred = classifier->predict(test.features);
      if (pred.size() != test.labels.size())
        throw std::runtime_error("run_cv: prediction count mismatch");

      int correct = 0;
      for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == test.labels[i]) ++correct;
      result.fold_accuracy(r, f) =
          test.labels.empty() ? 1.0
                              : static_cast<double>(correct) /
                                    static_cast<double>(test.labels.size());

      const FitPredictStats s = classifier->stats();
      totals.model_size_sum += s.model_size_sum;
      totals.iteration_sum += s.iteration_sum;
      totals.samples += s.samples;
    }
  }

  result.mean_accuracy = result.fold_accuracy.mean();
  if (totals.samples > 0) {
    result.mean_model_size =
        totals.model_size_sum / static_cast<double>(totals.samples);
    result.mean_iterations =
        totals.iteration_sum / static_cast<double>(totals.samples);
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

struct GridChoice {
  int k = 0;
  double gamma = 0.0;
  CvResult selection;  // 1-run CV at the winning point
};

/// Exhaustive search over the grid, scoring each point with a single CV
/// run. Ties on mean accuracy go to the smaller k, then the smaller gamma.
inline GridChoice grid_search(const FamilyFactory& family, const Dataset& data,
                              const GridSpec& grid, int folds,
                              std::uint64_t seed) {
  if (grid.k_values.empty() || grid.gamma_values.empty())
    throw std::invalid_argument("grid_search: empty grid");
  std::vector<int> ks = grid.k_values;
  std::vector<double> gammas = grid.gamma_values;
  std::sort(ks.begin(), ks.end());
  std::sort(gammas.begin(), gammas.end());

  GridChoice best;
  bool have = false;
  for (int k : ks)
    for (double gamma : gammas) {
      CvResult r = run_cv([&] { return family(k, gamma); }, data, 1, folds, seed);
      r.k = k;
      r.gamma = gamma;
      if (!have || r.mean_accuracy > best.selection.mean_accuracy) {
        best = {k, gamma, std::move(r)};
        have = true;
      }
    }
  return best;
}

}  // namespace lrvm

#endif  // LRVM_EVAL_HPP_
