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
#ifndef LRVM_RANKING_HPP_
#define LRVM_RANKING_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lrvm/common.hpp"
#include "lrvm/dataset.hpp"

namespace lrvm {

namespace detail {

/// Shortest round-trip decimal form (keeps CSV output re-parseable to the
/// exact double).
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Average ranks per classifier over an L x G accuracy matrix. Rank 1 is
/// the most accurate column in a row; ties share the mean of the positions
/// they occupy.
inline Vector rank_table(const RowMatrix& accuracy) {
  const Eigen::Index L = accuracy.rows();
  const Eigen::Index G = accuracy.cols();
  if (L < 1 || G < 2)
    throw std::invalid_argument("rank_table: need at least 1 row and 2 columns");
  if (!accuracy.allFinite())
    throw std::invalid_argument("rank_table: non-finite accuracy cell");

  Vector avg = Vector::Zero(G);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(G));
  for (Eigen::Index l = 0; l < L; ++l) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      if (accuracy(l, a) != accuracy(l, b)) return accuracy(l, a) > accuracy(l, b);
      return a < b;
    });
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() &&
             accuracy(l, order[j + 1]) == accuracy(l, order[i]))
        ++j;
      // positions i+1 .. j+1 share one rank
      const double shared =
          (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t p = i; p <= j; ++p) avg(order[p]) += shared;
      i = j + 1;
    }
  }
  return avg / static_cast<double>(L);
}

inline double friedman_chi2(const Vector& avg_ranks, int L) {
  const auto G = static_cast<double>(avg_ranks.size());
  if (avg_ranks.size() < 2 || L < 1)
    throw std::invalid_argument("friedman_chi2: need G >= 2 and L >= 1");
  const double expected_sum = G * (G + 1.0) / 2.0;
  if (std::abs(avg_ranks.sum() - expected_sum) > 1e-6)
    throw std::invalid_argument("friedman_chi2: ranks do not sum to G(G+1)/2");
  return (12.0 * L / (G * (G + 1.0))) *
         (avg_ranks.squaredNorm() - G * (G + 1.0) * (G + 1.0) / 4.0);
}

inline double fisher_f(double chi2, int L, int G) {
  const double denom = static_cast<double>(L) * (G - 1.0) - chi2;
  if (denom <= 0.0)
    throw std::domain_error("fisher_f: statistic undefined (denominator <= 0)");
  return (L - 1.0) * chi2 / denom;
}

inline double critical_difference(int G, int L, double cv_alpha) {
  if (cv_alpha < 0.0)
    throw std::invalid_argument("critical_difference: cv_alpha must be >= 0");
  if (G < 2 || L < 1)
    throw std::invalid_argument("critical_difference: need G >= 2 and L >= 1");
  return cv_alpha * std::sqrt(G * (G + 1.0) / (6.0 * static_cast<double>(L)));
}

/// Connected bars of a critical-difference diagram. `order` lists the
/// classifier indices sorted by average rank (ascending, index breaks
/// ties); `ranges` are inclusive [first, last] windows into `order`, one
/// per maximal run whose rank spread stays within cd.
struct NemenyiGroups {
  std::vector<int> order;
  std::vector<std::pair<int, int>> ranges;
};

inline NemenyiGroups nemenyi_groups(const Vector& avg_ranks, double cd) {
  if (cd < 0.0) throw std::invalid_argument("nemenyi_groups: cd must be >= 0");
  const int G = static_cast<int>(avg_ranks.size());
  NemenyiGroups out;
  out.order.resize(static_cast<std::size_t>(G));
  std::iota(out.order.begin(), out.order.end(), 0);
  std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    if (avg_ranks(a) != avg_ranks(b)) return avg_ranks(a) < avg_ranks(b);
    return a < b;
  });

  auto rank_at = [&](int pos) { return avg_ranks(out.order[static_cast<std::size_t>(pos)]); };
  for (int first = 0; first < G; ++first) {
    int last = first;
    while (last + 1 < G && rank_at(last + 1) - rank_at(first) <= cd) ++last;
    // maximal iff it cannot be extended to the left either
    if (first == 0 || rank_at(last) - rank_at(first - 1) > cd)
      out.ranges.emplace_back(first, last);
  }
  return out;
}

struct FriedmanReport {
  Vector avg_ranks;
  double chi2_f = 0.0;
  bool f_defined = false;
  double f_f = 0.0;
  double cv_alpha = 0.0;
  double cd = 0.0;
  NemenyiGroups groups;
};

inline FriedmanReport friedman_report(const RowMatrix& accuracy, double cv_alpha) {
  FriedmanReport rep;
  rep.avg_ranks = rank_table(accuracy);
  const int L = static_cast<int>(accuracy.rows());
  const int G = static_cast<int>(accuracy.cols());
  rep.chi2_f = friedman_chi2(rep.avg_ranks, L);
  try {
    rep.f_f = fisher_f(rep.chi2_f, L, G);
    rep.f_defined = true;
  } catch (const std::domain_error&) {
    rep.f_defined = false;
  }
  rep.cv_alpha = cv_alpha;
  rep.cd = critical_difference(G, L, cv_alpha);
  rep.groups = nemenyi_groups(rep.avg_ranks, rep.cd);
  return rep;
}

/// L x G accuracy matrix with row (dataset) and column (classifier) names;
/// the on-disk form is CSV with a header row and the dataset name in the
/// first column.
struct AccuracyTable {
  std::vector<std::string> datasets;
  std::vector<std::string> classifiers;
  RowMatrix values;
};

inline AccuracyTable load_accuracy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open accuracy table: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("accuracy table is empty: " + path);
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3)
    throw std::runtime_error("accuracy table needs >= 2 classifier columns: " + path);
  const bool all_numeric = std::all_of(
      header.begin(), header.end(), [](const std::string& cell) {
        double v = 0.0;
        return detail::parse_double(cell, v);
      });
  if (all_numeric)
    throw std::runtime_error("accuracy table has no header row: " + path);

  AccuracyTable table;
  table.classifiers.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("ragged accuracy row in " + path);
    table.datasets.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!detail::parse_double(cells[c], v))
        throw std::runtime_error("non-numeric accuracy cell '" + cells[c] +
                                 "' in " + path);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("accuracy table has no data rows: " + path);

  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.classifiers.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
  return table;
}

inline void save_accuracy_csv(const std::string& path, const AccuracyTable& table) {
  if (table.datasets.size() != static_cast<std::size_t>(table.values.rows()) ||
      table.classifiers.size() != static_cast<std::size_t>(table.values.cols()))
    throw std::invalid_argument("save_accuracy_csv: name/value shape mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write accuracy table: " + path);
  out << "dataset";
  for (const auto& c : table.classifiers) out << ',' << c;
  out << '\n';
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    out << table.datasets[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < table.values.cols(); ++c)
      out << ',' << detail::format_double(table.values(r, c));
    out << '\n';
  }
}

}  // namespace lrvm

#endif  // LRVM_RANKING_HPP_
