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
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "lrvm/ranking.hpp"
#include "test_support.hpp"

namespace {

lrvm::RowMatrix random_accuracies(int L, int G, std::uint64_t seed) {
  lrvm::RowMatrix m(L, G);
  lrvm::Rng rng(seed);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.uniform01();
  return m;
}

}  // namespace

TEST_CASE("rank_table ranks a single row directly") {
  lrvm::RowMatrix acc(1, 3);
  acc << 0.9, 0.8, 0.7;
  const lrvm::Vector ranks = lrvm::rank_table(acc);
  REQUIRE(ranks(0) == 1.0);
  REQUIRE(ranks(1) == 2.0);
  REQUIRE(ranks(2) == 3.0);
}

TEST_CASE("rank_table averages tied positions") {
  lrvm::RowMatrix acc(1, 3);
  acc << 0.9, 0.9, 0.1;
  const lrvm::Vector ranks = lrvm::rank_table(acc);
  REQUIRE(ranks(0) == 1.5);
  REQUIRE(ranks(1) == 1.5);
  REQUIRE(ranks(2) == 3.0);

  lrvm::RowMatrix flat(4, 5);
  flat.setConstant(0.5);
  const lrvm::Vector all_tied = lrvm::rank_table(flat);
  for (Eigen::Index j = 0; j < 5; ++j) REQUIRE(all_tied(j) == 3.0);  // (G+1)/2
}

TEST_CASE("rank sums are G(G+1)/2 for arbitrary tables") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const lrvm::RowMatrix acc = random_accuracies(12, 7, seed);
    const lrvm::Vector ranks = lrvm::rank_table(acc);
    REQUIRE(ranks.sum() == Catch::Approx(7.0 * 8.0 / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("rank_table is equivariant and friedman_chi2 invariant under column swaps") {
  const lrvm::RowMatrix acc = random_accuracies(10, 5, 99);
  lrvm::RowMatrix swapped = acc;
  swapped.col(0).swap(swapped.col(3));

  const lrvm::Vector r1 = lrvm::rank_table(acc);
  const lrvm::Vector r2 = lrvm::rank_table(swapped);
  REQUIRE(r2(0) == r1(3));
  REQUIRE(r2(3) == r1(0));
  REQUIRE(r2(1) == r1(1));

  REQUIRE(lrvm::friedman_chi2(r1, 10) == Catch::Approx(lrvm::friedman_chi2(r2, 10)));
}

TEST_CASE("rank_table rejects bad input") {
  lrvm::RowMatrix bad(1, 1);
  bad << 0.5;
  REQUIRE_THROWS(lrvm::rank_table(bad));
  lrvm::RowMatrix nan(1, 3);
  nan << 0.5, std::numeric_limits<double>::quiet_NaN(), 0.2;
  REQUIRE_THROWS(lrvm::rank_table(nan));
}

TEST_CASE("friedman_chi2 on hand-checked cases") {
  lrvm::Vector flat(4);
  flat.setConstant(2.5);  // (G+1)/2 everywhere
  REQUIRE(lrvm::friedman_chi2(flat, 6) == Catch::Approx(0.0).margin(1e-9));

  lrvm::Vector two(2);
  two << 1.0, 2.0;
  // (12*2/(2*3)) * (5 - 2*9/4) = 4 * 0.5 = 2
  REQUIRE(lrvm::friedman_chi2(two, 2) == Catch::Approx(2.0));

  lrvm::Vector wrong(3);
  wrong << 1.0, 2.0, 2.5;  // sums to 5.5, not 6
  REQUIRE_THROWS(lrvm::friedman_chi2(wrong, 4));
}

TEST_CASE("friedman_chi2 equals the scalar formula on a 9-classifier row") {
  lrvm::Vector ranks(9);
  ranks << 6.55, 6.8, 6.65, 2.8, 4.5, 6.45, 6.6, 2.9, 1.75;
  const int L = 20;

  long double sum_sq = 0.0L;
  for (Eigen::Index j = 0; j < 9; ++j)
    sum_sq += static_cast<long double>(ranks(j)) * static_cast<long double>(ranks(j));
  const long double expected =
      (12.0L * L) / (9.0L * 10.0L) * (sum_sq - 9.0L * 10.0L * 10.0L / 4.0L);

  const double chi2 = lrvm::friedman_chi2(ranks, L);
  REQUIRE(chi2 == Catch::Approx(static_cast<double>(expected)).epsilon(1e-12));
  REQUIRE(chi2 > 80.0);  // far from the flat-rank value of zero
}

TEST_CASE("fisher_f on hand-checked cases") {
  REQUIRE(lrvm::fisher_f(0.0, 5, 3) == 0.0);
  // L=20, G=9, chi2=88.24: (19 * 88.24) / (160 - 88.24)
  REQUIRE(lrvm::fisher_f(88.24, 20, 9) ==
          Catch::Approx(19.0 * 88.24 / (160.0 - 88.24)).epsilon(1e-12));
  REQUIRE_THROWS_AS(lrvm::fisher_f(2.0, 2, 2), std::domain_error);
  REQUIRE_THROWS_AS(lrvm::fisher_f(3.0, 2, 2), std::domain_error);
}

TEST_CASE("critical_difference closed form and scaling laws") {
  REQUIRE(lrvm::critical_difference(2, 6, 0.0) == 0.0);
  REQUIRE(lrvm::critical_difference(2, 6, 1.0) ==
          Catch::Approx(std::sqrt(6.0 / 36.0)).epsilon(1e-12));

  const double base = lrvm::critical_difference(5, 10, 2.0);
  // degree 1 in cv_alpha
  REQUIRE(lrvm::critical_difference(5, 10, 6.0) == Catch::Approx(3.0 * base));
  // degree -1/2 in L
  REQUIRE(lrvm::critical_difference(5, 40, 2.0) == Catch::Approx(base / 2.0));

  REQUIRE_THROWS(lrvm::critical_difference(5, 10, -1.0));
}

TEST_CASE("nemenyi_groups produces maximal bars") {
  lrvm::Vector distinct(3);
  distinct << 3.0, 1.0, 2.0;

  const auto singletons = lrvm::nemenyi_groups(distinct, 0.0);
  REQUIRE(singletons.order == std::vector<int>{1, 2, 0});
  REQUIRE(singletons.ranges ==
          std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}});

  const auto everything = lrvm::nemenyi_groups(distinct, 10.0);
  REQUIRE(everything.ranges == std::vector<std::pair<int, int>>{{0, 2}});

  lrvm::Vector chain(3);
  chain << 1.0, 2.0, 3.0;
  const auto overlap = lrvm::nemenyi_groups(chain, 1.5);
  REQUIRE(overlap.ranges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});

  // no emitted range may be contained in another
  for (std::size_t a = 0; a < overlap.ranges.size(); ++a)
    for (std::size_t b = 0; b < overlap.ranges.size(); ++b)
      if (a != b)
        REQUIRE_FALSE((overlap.ranges[a].first >= overlap.ranges[b].first &&
                       overlap.ranges[a].second <= overlap.ranges[b].second));

  REQUIRE_THROWS(lrvm::nemenyi_groups(chain, -0.1));
}

TEST_CASE("friedman_report stitches the pieces together") {
  const lrvm::RowMatrix acc = random_accuracies(8, 4, 5);
  const lrvm::FriedmanReport rep = lrvm::friedman_report(acc, 2.5);
  REQUIRE(rep.avg_ranks.size() == 4);
  REQUIRE(rep.cv_alpha == 2.5);
  REQUIRE(rep.cd == Catch::Approx(lrvm::critical_difference(4, 8, 2.5)));
  REQUIRE(rep.chi2_f >= 0.0);
  REQUIRE_FALSE(rep.groups.order.empty());

  // identical columns: chi2 0, ranks tied at 1.5
  lrvm::RowMatrix same(3, 2);
  same << 0.5, 0.5, 0.6, 0.6, 0.7, 0.7;
  const lrvm::FriedmanReport tied = lrvm::friedman_report(same, 1.0);
  REQUIRE(tied.avg_ranks(0) == 1.5);
  REQUIRE(tied.avg_ranks(1) == 1.5);
  REQUIRE(tied.chi2_f == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(tied.f_defined);
  REQUIRE(tied.f_f == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("accuracy tables round-trip through CSV exactly") {
  test_support::TempDir dir("acc");
  lrvm::AccuracyTable table;
  table.datasets = {"iris", "wine"};
  table.classifiers = {"a", "b", "c"};
  table.values = random_accuracies(2, 3, 31);

  const std::string path = dir.file("table.csv");
  lrvm::save_accuracy_csv(path, table);
  const lrvm::AccuracyTable back = lrvm::load_accuracy_csv(path);
  REQUIRE(back.datasets == table.datasets);
  REQUIRE(back.classifiers == table.classifiers);
  REQUIRE(back.values == table.values);  // shortest round-trip formatting
}

TEST_CASE("accuracy table loader rejects malformed files") {
  test_support::TempDir dir("acc");
  REQUIRE_THROWS(lrvm::load_accuracy_csv(dir.file("missing.csv")));

  test_support::write_file(dir.file("narrow.csv"), "dataset,a\nx,0.5\n");
  REQUIRE_THROWS(lrvm::load_accuracy_csv(dir.file("narrow.csv")));

  test_support::write_file(dir.file("ragged.csv"), "dataset,a,b\nx,0.5\n");
  REQUIRE_THROWS(lrvm::load_accuracy_csv(dir.file("ragged.csv")));

  test_support::write_file(dir.file("word.csv"), "dataset,a,b\nx,0.5,oops\n");
  REQUIRE_THROWS(lrvm::load_accuracy_csv(dir.file("word.csv")));

  test_support::write_file(dir.file("headerless.csv"), "0.1,0.2,0.3\n0.4,0.5,0.6\n");
  REQUIRE_THROWS(lrvm::load_accuracy_csv(dir.file("headerless.csv")));

  test_support::write_file(dir.file("empty.csv"), "");
  REQUIRE_THROWS(lrvm::load_accuracy_csv(dir.file("empty.csv")));

  test_support::write_file(dir.file("norows.csv"), "dataset,a,b\n");
  REQUIRE_THROWS(lrvm::load_accuracy_csv(dir.file("norows.csv")));

  lrvm::AccuracyTable bad;
  bad.datasets = {"x"};
  bad.classifiers = {"a"};
  bad.values = random_accuracies(2, 2, 1);
  REQUIRE_THROWS(lrvm::save_accuracy_csv(dir.file("out.csv"), bad));
}
