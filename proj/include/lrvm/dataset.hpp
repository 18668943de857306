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
#ifndef LRVM_DATASET_HPP_
#define LRVM_DATASET_HPP_

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lrvm/common.hpp"

namespace lrvm {

/// Feature matrix (row = instance) with contiguous integer class labels.
struct Dataset {
  RowMatrix features;       // N x L
  std::vector<int> labels;  // values in {0..class_count-1}
  int class_count = 0;
  std::string name;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

/// Per-feature mean and population standard deviation (divide by N).
struct NormStats {
  Vector mu;
  Vector sigma;
};

struct FoldPlan {
  std::vector<int> assignments;  // fold id per instance
  int fold_count = 0;
  std::uint64_t seed = 0;
};

constexpr int kLastColumn = -1;

inline void validate_dataset(const Dataset& d) {
  if (d.features.rows() < 1 || d.features.cols() < 1)
    throw std::invalid_argument("dataset '" + d.name + "' is empty");
  if (static_cast<Eigen::Index>(d.labels.size()) != d.features.rows())
    throw std::invalid_argument("dataset '" + d.name + "': label count mismatch");
  std::vector<int> seen(static_cast<std::size_t>(d.class_count), 0);
  for (int t : d.labels) {
    if (t < 0 || t >= d.class_count)
      throw std::invalid_argument("dataset '" + d.name + "': label out of range");
    seen[static_cast<std::size_t>(t)] = 1;
  }
  for (int s : seen)
    if (!s)
      throw std::invalid_argument("dataset '" + d.name + "': class with no members");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    const std::string_view raw(line.data() + start,
                               (pos == std::string::npos ? line.size() : pos) - start);
    cells.emplace_back(trim(raw));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace detail

/// Loads a comma-separated file. A header row is assumed when any feature
/// cell of the first row fails to parse as a number. Label cells (integers
/// or category strings) are mapped to 0..C-1 in first-appearance order.
inline Dataset load_csv(const std::string& path, int label_column = kLastColumn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_csv_line(line));
  }
  if (rows.empty()) throw std::runtime_error("empty dataset file: " + path);

  const std::size_t cols = rows.front().size();
  if (cols < 2)
    throw std::runtime_error(path + ": need at least one feature and a label column");
  const std::size_t label_idx =
      label_column == kLastColumn ? cols - 1 : static_cast<std::size_t>(label_column);
  if (label_column != kLastColumn &&
      (label_column < 0 || label_idx >= cols))
    throw std::runtime_error(path + ": label column out of range");

  // Header iff some feature cell of row 1 is non-numeric.
  bool has_header = false;
  for (std::size_t j = 0; j < cols; ++j) {
    double v;
    if (j != label_idx && !detail::parse_double(rows[0][j], v)) {
      has_header = true;
      break;
    }
  }

  const std::size_t first_data = has_header ? 1 : 0;
  if (rows.size() <= first_data)
    throw std::runtime_error(path + ": no data rows");

  Dataset d;
  d.name = std::filesystem::path(path).stem().string();
  const std::size_t n = rows.size() - first_data;
  d.features.resize(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(cols - 1));
  d.labels.reserve(n);

  std::vector<std::string> label_names;
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != cols)
      throw std::runtime_error(path + ": row " + std::to_string(r + 1) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(cols));
    Eigen::Index fj = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (j == label_idx) continue;
      double v;
      if (!detail::parse_double(cells[j], v))
        throw std::runtime_error(path + ": non-numeric feature '" + cells[j] +
                                 "' at row " + std::to_string(r + 1));
      d.features(static_cast<Eigen::Index>(r - first_data), fj++) = v;
    }
    const std::string& tok = cells[label_idx];
    auto it = std::find(label_names.begin(), label_names.end(), tok);
    if (it == label_names.end()) {
      label_names.push_back(tok);
      it = std::prev(label_names.end());
    }
    d.labels.push_back(static_cast<int>(it - label_names.begin()));
  }
  d.class_count = static_cast<int>(label_names.size());
  validate_dataset(d);
  return d;
}

/// Fits per-feature mean and population standard deviation on training rows.
inline NormStats zscore_fit(const Dataset& train) {
  const auto& X = train.features;
  if (X.rows() < 1) throw std::invalid_argument("zscore_fit: empty dataset");
  NormStats s;
  s.mu = X.colwise().mean();
  const Eigen::Index n = X.rows();
  s.sigma.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var =
        (X.col(j).array() - s.mu(j)).square().sum() / static_cast<double>(n);
    s.sigma(j) = std::sqrt(var);
  }
  return s;
}

/// (x - mu) / sigma per column; features with sigma == 0 map to 0.
inline RowMatrix zscore_apply(const NormStats& stats, const RowMatrix& X) {
  if (X.cols() != stats.mu.size())
    throw std::invalid_argument("zscore_apply: column count mismatch");
  RowMatrix out(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (stats.sigma(j) == 0.0)
      out.col(j).setZero();
    else
      out.col(j) = (X.col(j).array() - stats.mu(j)) / stats.sigma(j);
  }
  return out;
}

/// Per-class round-robin fold assignment after a seeded in-class shuffle.
inline FoldPlan stratified_kfold(const Dataset& data, int folds,
                                 std::uint64_t seed) {
  const Eigen::Index n = data.size();
  if (folds < 2) throw std::invalid_argument("stratified_kfold: folds must be >= 2");
  if (folds > n)
    throw std::invalid_argument("stratified_kfold: more folds than instances");

  FoldPlan plan;
  plan.fold_count = folds;
  plan.seed = seed;
  plan.assignments.assign(static_cast<std::size_t>(n), -1);

  Rng rng(seed);
  for (int c = 0; c < data.class_count; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.labels.size(); ++i)
      if (data.labels[i] == c) members.push_back(i);
    // Fisher-Yates; explicit so the plan does not depend on the stdlib.
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[rng.uniform_below(i)]);
    for (std::size_t i = 0; i < members.size(); ++i)
      plan.assignments[members[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }
  return plan;
}

/// Two-class 2-D Gaussian-mixture data in the Ripley style: two clusters
/// per class, per-axis standard deviation 0.25.
inline Dataset gen_ripley(int n_per_class, std::uint64_t seed) {
  if (n_per_class < 1)
    throw std::invalid_argument("gen_ripley: n_per_class must be >= 1");
  static const double kCenters[2][2][2] = {
      {{-0.7, 0.3}, {0.3, 0.3}},   // class 0
      {{-0.3, 0.7}, {0.4, 0.7}}};  // class 1
  constexpr double kStd = 0.25;

  Dataset d;
  d.name = "ripley";
  d.class_count = 2;
  d.features.resize(2 * n_per_class, 2);
  d.labels.reserve(static_cast<std::size_t>(2 * n_per_class));
  Rng rng(seed);
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      const auto& mu = kCenters[c][rng.uniform_below(2)];
      const Eigen::Index row = static_cast<Eigen::Index>(c) * n_per_class + i;
      d.features(row, 0) = mu[0] + kStd * rng.normal();
      d.features(row, 1) = mu[1] + kStd * rng.normal();
      d.labels.push_back(c);
    }
  }
  return d;
}

/// Row-subset view copy; keeps the parent's class_count and label ids.
inline Dataset dataset_subset(const Dataset& data,
                              const std::vector<std::size_t>& rows) {
  Dataset out;
  out.name = data.name;
  out.class_count = data.class_count;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) =
        data.features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(data.labels[rows[i]]);
  }
  return out;
}

}  // namespace lrvm

#endif  // LRVM_DATASET_HPP_
