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
#ifndef LRVM_CLASSIFIERS_HPP_
#define LRVM_CLASSIFIERS_HPP_

#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lrvm/common.hpp"
#include "lrvm/dataset.hpp"
#include "lrvm/eval.hpp"
#include "lrvm/kernel.hpp"
#include "lrvm/knn.hpp"
#include "lrvm/local.hpp"
#include "lrvm/rvm.hpp"

namespace lrvm {

class KnnClassifier : public Classifier {
 public:
  explicit KnnClassifier(int k) : k_(k) {}

  void fit(const Dataset& train) override { train_ = train; }

  std::vector<int> predict(const RowMatrix& X) override {
    std::vector<int> out(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      out[static_cast<std::size_t>(i)] = knn_classify(X.row(i), train_, k_);
    return out;
  }

 private:
  int k_;
  Dataset train_;
};

/// One-vs-rest batch of global kernel RVMs over a full training set.
/// Binary data trains a single machine with class 1 as the positive target.
struct GlobalRvmModels {
  std::vector<RvmModel> models;
  std::vector<TrainReport> reports;
  std::vector<int> positives;         // class separated by each model
  std::vector<RowMatrix> rv_rows;     // relevance-vector feature rows per model
  std::vector<std::vector<Eigen::Index>> rv_indices;  // training-row ids per model
  int class_count = 0;
};

inline GlobalRvmModels fit_global_rvm(const Dataset& train, double gamma,
                                      const TrainerSettings& base = {}) {
  const GramTable table = build_gram(train.features, gamma);
  DesignMatrix design;
  design.has_bias = true;
  design.values.resize(train.size(), train.size() + 1);
  design.values.col(0).setOnes();
  design.values.rightCols(train.size()) = table.values;

  TrainerSettings settings = base;
  settings.gamma = gamma;

  GlobalRvmModels out;
  out.class_count = train.class_count;
  std::vector<int> positives;
  if (train.class_count == 2) {
    positives = {1};
  } else {
    for (int c = 0; c < train.class_count; ++c) positives.push_back(c);
  }

  for (int c : positives) {
    std::vector<int> targets(train.labels.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
      targets[i] = train.labels[i] == c ? 1 : 0;
    auto [model, report] = train_rvm(design, targets, settings);

    std::vector<Eigen::Index> idx;
    for (Eigen::Index a : model.active)
      if (!(model.has_bias && a == 0)) idx.push_back(a - 1);
    RowMatrix rows(static_cast<Eigen::Index>(idx.size()), train.dim());
    for (std::size_t i = 0; i < idx.size(); ++i)
      rows.row(static_cast<Eigen::Index>(i)) = train.features.row(idx[i]);

    out.models.push_back(std::move(model));
    out.reports.push_back(report);
    out.positives.push_back(c);
    out.rv_rows.push_back(std::move(rows));
    out.rv_indices.push_back(std::move(idx));
  }
  return out;
}

/// Class decision for one query; fills per-class probabilities when
/// requested (normalized sigmoid scores, smaller class id wins ties).
inline int predict_global(const GlobalRvmModels& m,
                          const Eigen::Ref<const Eigen::RowVectorXd>& x,
                          Vector* probabilities = nullptr) {
  if (m.models.empty()) throw std::logic_error("predict_global: no models fit");
  Vector scores = Vector::Zero(m.class_count);
  if (m.class_count == 2) {
    const double p =
        predict_prob(m.models[0], cross_kernel(x, m.rv_rows[0], m.models[0].gamma));
    scores(1) = p;
    scores(0) = 1.0 - p;
  } else {
    for (std::size_t i = 0; i < m.models.size(); ++i)
      scores(m.positives[i]) = predict_prob(
          m.models[i], cross_kernel(x, m.rv_rows[i], m.models[i].gamma));
  }
  int best = 0;
  for (int c = 1; c < m.class_count; ++c)
    if (scores(c) > scores(best)) best = c;
  if (probabilities) {
    const double total = scores.sum();
    *probabilities = total > 0.0 ? Vector(scores / total) : scores;
  }
  return best;
}

class GlobalRvmClassifier : public Classifier {
 public:
  explicit GlobalRvmClassifier(double gamma, TrainerSettings settings = {})
      : gamma_(gamma), settings_(settings) {}

  void fit(const Dataset& train) override {
    models_ = fit_global_rvm(train, gamma_, settings_);
    for (std::size_t i = 0; i < models_.models.size(); ++i) {
      stats_.model_size_sum +=
          static_cast<double>(models_.models[i].relevance_count());
      stats_.iteration_sum += models_.reports[i].outer_iterations;
      ++stats_.samples;
    }
  }

  std::vector<int> predict(const RowMatrix& X) override {
    std::vector<int> out(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      out[static_cast<std::size_t>(i)] = predict_global(models_, X.row(i));
    return out;
  }

  FitPredictStats stats() const override { return stats_; }

  const GlobalRvmModels& models() const { return models_; }

 private:
  double gamma_;
  TrainerSettings settings_;
  GlobalRvmModels models_;
  FitPredictStats stats_;
};

/// Harness adapter for the per-query localized machine. Individual query
/// failures fall back to the -1 sentinel (scored as a miss) instead of
/// aborting the batch; counters cover every query, shortcuts included.
class LrvmClassifier : public Classifier {
 public:
  LrvmClassifier(int k, double gamma, unsigned threads = 1,
                 TrainerSettings settings = {})
      : threads_(threads) {
    config_.k = k;
    config_.gamma = gamma;
    config_.trainer = settings;
  }

  void fit(const Dataset& train) override {
    train_ = train;
    table_ = build_gram(train_.features, config_.gamma);
  }

  std::vector<int> predict(const RowMatrix& X) override {
    const BatchResult batch =
        classify_batch(X, train_, table_, config_, threads_);
    std::vector<int> out(batch.predictions.size());
    for (std::size_t i = 0; i < batch.predictions.size(); ++i) {
      out[i] = batch.predictions[i].predicted_class;
      stats_.model_size_sum += batch.predictions[i].lrv_count;
      stats_.iteration_sum += batch.predictions[i].iterations;
      ++stats_.samples;
    }
    return out;
  }

  FitPredictStats stats() const override { return stats_; }

 private:
  LrvmConfig config_;
  unsigned threads_;
  Dataset train_;
  GramTable table_;
  FitPredictStats stats_;
};

}  // namespace lrvm

#endif  // LRVM_CLASSIFIERS_HPP_
