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
#ifndef LRVM_LOCAL_HPP_
#define LRVM_LOCAL_HPP_

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lrvm/common.hpp"
#include "lrvm/dataset.hpp"
#include "lrvm/kernel.hpp"
#include "lrvm/rvm.hpp"

namespace lrvm {

struct LrvmConfig {
  int k = 3;
  double gamma = 1.0;
  TrainerSettings trainer;
};

/// Outcome of one localized classification. `iterations`, `lrv_count` and
/// the surviving bases describe the winning local model; a homogeneous
/// neighborhood short-circuits training entirely (shortcut flag).
struct LocalPrediction {
  int predicted_class = -1;
  Vector probabilities;  // length C; absent classes stay 0
  int lrv_count = 0;
  int iterations = 0;
  bool shortcut = false;
  std::vector<int> failed_classes;
  std::vector<Eigen::Index> lrv_rows;  // training-row ids of the winning model's RVs
};

struct BatchResult {
  std::vector<LocalPrediction> predictions;
  std::vector<std::pair<std::size_t, std::string>> errors;
};

/// Full (squared distance, index) ordering of training rows around x;
/// ties resolved by ascending index.
inline std::vector<std::pair<double, Eigen::Index>> neighbor_order(
    const Eigen::Ref<const Eigen::RowVectorXd>& x, const RowMatrix& train) {
  if (x.size() != train.cols())
    throw std::invalid_argument("neighbor_order: dimension mismatch");
  std::vector<std::pair<double, Eigen::Index>> order;
  order.reserve(static_cast<std::size_t>(train.rows()));
  for (Eigen::Index i = 0; i < train.rows(); ++i)
    order.emplace_back(
        detail::squared_distance(x.data(), train.row(i).data(), train.cols()), i);
  std::sort(order.begin(), order.end());
  return order;
}

/// Indices of the k nearest training rows, sorted by (distance, index).
inline std::vector<Eigen::Index> find_neighbors(
    const Eigen::Ref<const Eigen::RowVectorXd>& x, const RowMatrix& train, int k) {
  if (k < 1 || k > train.rows())
    throw std::invalid_argument("find_neighbors: k out of range");
  const auto order = neighbor_order(x, train);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = order[i].second;
  return idx;
}

/// k x (k+1) local design: bias column plus the neighbors' kernel block
/// fetched from the Gram table.
inline DesignMatrix local_design(const GramTable& table,
                                 const std::vector<Eigen::Index>& neighbor_idx) {
  const RowMatrix block = submatrix(table, neighbor_idx);
  DesignMatrix d;
  d.has_bias = true;
  d.values.resize(block.rows(), block.cols() + 1);
  d.values.col(0).setOnes();
  d.values.rightCols(block.cols()) = block;
  return d;
}

namespace detail {

/// Kernel values between x and the winning model's relevance vectors
/// (training rows resolved through the neighbor list).
inline Vector rv_kappa(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                       const Dataset& data,
                       const std::vector<Eigen::Index>& neigh,
                       const RvmModel& model) {
  RowMatrix rows(model.relevance_count(), data.dim());
  Eigen::Index r = 0;
  for (Eigen::Index a : model.active) {
    if (model.has_bias && a == 0) continue;
    rows.row(r++) = data.features.row(neigh[static_cast<std::size_t>(a - 1)]);
  }
  return cross_kernel(x, rows, model.gamma);
}

}  // namespace detail

/// Per-query pipeline: neighbor search, local design via Gram lookup,
/// one-vs-rest local training over the classes present, then argmax of the
/// normalized sigmoid scores (smaller class id wins ties).
inline LocalPrediction classify_local(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                                      const Dataset& data, const GramTable& table,
                                      const LrvmConfig& config) {
  if (table.source_count != data.size() || table.gamma != config.gamma)
    throw std::invalid_argument("classify_local: table does not match data/config");
  const auto neigh = find_neighbors(x, data.features, config.k);

  LocalPrediction out;
  out.probabilities = Vector::Zero(data.class_count);

  // Homogeneous neighborhood: unanimous vote, no training.
  bool homogeneous = true;
  const int first_label = data.labels[static_cast<std::size_t>(neigh[0])];
  for (Eigen::Index i : neigh)
    if (data.labels[static_cast<std::size_t>(i)] != first_label) {
      homogeneous = false;
      break;
    }
  if (homogeneous) {
    out.predicted_class = first_label;
    out.probabilities(first_label) = 1.0;
    out.shortcut = true;
    return out;
  }

  const DesignMatrix design = local_design(table, neigh);
  TrainerSettings trainer = config.trainer;
  trainer.gamma = config.gamma;

  auto targets_for = [&](int positive) {
    std::vector<int> t(neigh.size());
    for (std::size_t i = 0; i < neigh.size(); ++i)
      t[i] = data.labels[static_cast<std::size_t>(neigh[i])] == positive ? 1 : 0;
    return t;
  };

  Vector scores = Vector::Zero(data.class_count);
  RvmModel winner_model;
  TrainReport winner_report;
  bool have_winner = false;

  if (data.class_count == 2) {
    // Binary data trains once with class 1 as the positive target.
    try {
      auto [model, report] = train_rvm(design, targets_for(1), trainer);
      const double p = predict_prob(model, detail::rv_kappa(x, data, neigh, model));
      scores(1) = p;
      scores(0) = 1.0 - p;
      winner_model = std::move(model);
      winner_report = report;
      have_winner = true;
    } catch (const std::exception&) {
      out.failed_classes = {0, 1};
    }
    out.predicted_class = scores(1) > scores(0) ? 1 : 0;
  } else {
    std::vector<int> present;
    for (Eigen::Index i : neigh) {
      const int c = data.labels[static_cast<std::size_t>(i)];
      if (std::find(present.begin(), present.end(), c) == present.end())
        present.push_back(c);
    }
    std::sort(present.begin(), present.end());

    std::vector<std::pair<RvmModel, TrainReport>> trained(present.size());
    std::vector<bool> ok(present.size(), false);
    for (std::size_t ci = 0; ci < present.size(); ++ci) {
      const int c = present[ci];
      try {
        trained[ci] = train_rvm(design, targets_for(c), trainer);
        scores(c) = predict_prob(trained[ci].first,
                                 detail::rv_kappa(x, data, neigh, trained[ci].first));
        ok[ci] = true;
      } catch (const std::exception&) {
        out.failed_classes.push_back(c);
      }
    }
    int best = present.front();
    for (int c : present)
      if (scores(c) > scores(best)) best = c;
    out.predicted_class = best;
    for (std::size_t ci = 0; ci < present.size(); ++ci)
      if (present[ci] == best && ok[ci]) {
        winner_model = std::move(trained[ci].first);
        winner_report = trained[ci].second;
        have_winner = true;
      }
  }

  const double total = scores.sum();
  out.probabilities = total > 0.0 ? Vector(scores / total) : scores;
  if (have_winner) {
    out.lrv_count = static_cast<int>(winner_model.relevance_count());
    out.iterations = winner_report.outer_iterations;
    for (Eigen::Index a : winner_model.active) {
      if (winner_model.has_bias && a == 0) continue;
      out.lrv_rows.push_back(neigh[static_cast<std::size_t>(a - 1)]);
    }
  }
  return out;
}

/// Elementwise classify_local over the rows of X_test; per-row failures are
/// collected (prediction slot keeps the -1 sentinel) and the batch continues.
/// Output is index-aligned with the input for any worker count.
inline BatchResult classify_batch(const RowMatrix& X_test, const Dataset& data,
                                  const GramTable& table, const LrvmConfig& config,
                                  unsigned threads = 1) {
  BatchResult result;
  result.predictions.resize(static_cast<std::size_t>(X_test.rows()));
  std::vector<std::string> row_error(static_cast<std::size_t>(X_test.rows()));
  parallel_for(static_cast<std::size_t>(X_test.rows()), threads, [&](std::size_t i) {
    try {
      result.predictions[i] =
          classify_local(X_test.row(static_cast<Eigen::Index>(i)), data, table, config);
    } catch (const std::exception& e) {
      row_error[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < row_error.size(); ++i)
    if (!row_error[i].empty()) result.errors.emplace_back(i, row_error[i]);
  return result;
}

}  // namespace lrvm

#endif  // LRVM_LOCAL_HPP_
