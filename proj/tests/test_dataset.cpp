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
#include <vector>

#include "lrvm/dataset.hpp"
#include "test_support.hpp"

using test_support::TempDir;
using test_support::write_file;

TEST_CASE("load_csv reads a headered file and maps labels by first appearance") {
  TempDir dir("csv");
  write_file(dir.file("toy.csv"),
             "f1,f2,class\n"
             "1.0,2.0,versicolor\n"
             "3.0,4.0,setosa\n"
             "5.0,6.0,versicolor\n");
  const lrvm::Dataset d = lrvm::load_csv(dir.file("toy.csv"));
  REQUIRE(d.name == "toy");
  REQUIRE(d.size() == 3);
  REQUIRE(d.dim() == 2);
  REQUIRE(d.class_count == 2);
  REQUIRE(d.labels == std::vector<int>{0, 1, 0});  // versicolor first
  REQUIRE(d.features(1, 0) == 3.0);
  REQUIRE(d.features(2, 1) == 6.0);
}

TEST_CASE("load_csv handles headerless numeric files") {
  TempDir dir("csv");
  write_file(dir.file("plain.csv"),
             "1.5,0\n"
             "2.5,1\n"
             "3.5,0\n");
  const lrvm::Dataset d = lrvm::load_csv(dir.file("plain.csv"));
  REQUIRE(d.size() == 3);
  REQUIRE(d.dim() == 1);
  REQUIRE(d.class_count == 2);
}

TEST_CASE("load_csv honors an explicit label column") {
  TempDir dir("csv");
  write_file(dir.file("front.csv"),
             "label,a,b\n"
             "x,1,2\n"
             "y,3,4\n");
  const lrvm::Dataset d = lrvm::load_csv(dir.file("front.csv"), 0);
  REQUIRE(d.dim() == 2);
  REQUIRE(d.labels == std::vector<int>{0, 1});
  REQUIRE(d.features(0, 0) == 1.0);
}

TEST_CASE("load_csv rejects broken inputs") {
  TempDir dir("csv");
  REQUIRE_THROWS(lrvm::load_csv(dir.file("absent.csv")));

  write_file(dir.file("ragged.csv"), "a,b,c\n1,2,x\n1,2,3,y\n");
  REQUIRE_THROWS(lrvm::load_csv(dir.file("ragged.csv")));

  write_file(dir.file("words.csv"), "a,b,c\n1,two,x\n");
  REQUIRE_THROWS(lrvm::load_csv(dir.file("words.csv")));

  write_file(dir.file("empty.csv"), "");
  REQUIRE_THROWS(lrvm::load_csv(dir.file("empty.csv")));

  write_file(dir.file("headeronly.csv"), "a,b,c\n");
  REQUIRE_THROWS(lrvm::load_csv(dir.file("headeronly.csv")));
}

TEST_CASE("zscore_fit computes population moments") {
  lrvm::Dataset d;
  d.name = "z";
  d.class_count = 2;
  d.features.resize(4, 2);
  d.features << 1.0, 5.0,
                2.0, 5.0,
                3.0, 5.0,
                4.0, 5.0;
  d.labels = {0, 0, 1, 1};

  const lrvm::NormStats s = lrvm::zscore_fit(d);
  REQUIRE(s.mu(0) == Catch::Approx(2.5));
  // population (divide by N) standard deviation of {1,2,3,4}
  REQUIRE(s.sigma(0) == Catch::Approx(std::sqrt(1.25)));
  REQUIRE(s.sigma(1) == 0.0);

  const lrvm::RowMatrix z = lrvm::zscore_apply(s, d.features);
  REQUIRE(z.col(0).mean() == Catch::Approx(0.0).margin(1e-12));
  for (Eigen::Index i = 0; i < 4; ++i) REQUIRE(z(i, 1) == 0.0);  // sigma 0 -> 0

  lrvm::RowMatrix wrong(2, 3);
  wrong.setZero();
  REQUIRE_THROWS(lrvm::zscore_apply(s, wrong));
}

TEST_CASE("normalized data re-normalizes to identity") {
  const lrvm::Dataset d = test_support::make_blobs(40, 3.0, 5);
  const lrvm::NormStats s = lrvm::zscore_fit(d);
  lrvm::Dataset n = d;
  n.features = lrvm::zscore_apply(s, d.features);
  const lrvm::NormStats s2 = lrvm::zscore_fit(n);
  for (Eigen::Index j = 0; j < n.dim(); ++j) {
    REQUIRE(s2.mu(j) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(s2.sigma(j) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("stratified_kfold partitions every class evenly") {
  lrvm::Dataset d = test_support::make_blobs(25, 2.0, 17);
  // unbalance: drop 7 rows of class 1
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < 43; ++i) keep.push_back(i);
  d = lrvm::dataset_subset(d, keep);

  const lrvm::FoldPlan plan = lrvm::stratified_kfold(d, 5, 99);
  REQUIRE(plan.fold_count == 5);
  REQUIRE(plan.assignments.size() == 43);

  for (int c = 0; c < 2; ++c) {
    std::vector<int> per_fold(5, 0);
    for (std::size_t i = 0; i < d.labels.size(); ++i)
      if (d.labels[i] == c) {
        REQUIRE(plan.assignments[i] >= 0);
        REQUIRE(plan.assignments[i] < 5);
        ++per_fold[static_cast<std::size_t>(plan.assignments[i])];
      }
    const auto [lo, hi] = std::minmax_element(per_fold.begin(), per_fold.end());
    REQUIRE(*hi - *lo <= 1);
  }
}

TEST_CASE("stratified_kfold is seed-deterministic and seed-sensitive") {
  const lrvm::Dataset d = test_support::make_blobs(30, 2.0, 3);
  const auto a = lrvm::stratified_kfold(d, 10, 1);
  const auto b = lrvm::stratified_kfold(d, 10, 1);
  const auto c = lrvm::stratified_kfold(d, 10, 2);
  REQUIRE(a.assignments == b.assignments);
  REQUIRE(a.assignments != c.assignments);
}

TEST_CASE("stratified_kfold rejects bad fold counts") {
  const lrvm::Dataset d = test_support::make_blobs(5, 2.0, 3);
  REQUIRE_THROWS(lrvm::stratified_kfold(d, 1, 0));
  REQUIRE_THROWS(lrvm::stratified_kfold(d, 11, 0));
}

TEST_CASE("gen_ripley layout and statistics") {
  const lrvm::Dataset d = lrvm::gen_ripley(2000, 31);
  REQUIRE(d.size() == 4000);
  REQUIRE(d.dim() == 2);
  for (int i = 0; i < 2000; ++i) REQUIRE(d.labels[static_cast<std::size_t>(i)] == 0);
  for (int i = 2000; i < 4000; ++i) REQUIRE(d.labels[static_cast<std::size_t>(i)] == 1);

  // class 0 clusters at (-0.7, 0.3) and (0.3, 0.3): y-mean 0.3, x-mean -0.2
  const auto head = d.features.topRows(2000);
  REQUIRE(head.col(1).mean() == Catch::Approx(0.3).margin(0.05));
  REQUIRE(head.col(0).mean() == Catch::Approx(-0.2).margin(0.06));
  // class 1 clusters at (-0.3, 0.7) and (0.4, 0.7)
  const auto tail = d.features.bottomRows(2000);
  REQUIRE(tail.col(1).mean() == Catch::Approx(0.7).margin(0.05));

  const lrvm::Dataset again = lrvm::gen_ripley(2000, 31);
  REQUIRE(again.features == d.features);
  REQUIRE_THROWS(lrvm::gen_ripley(0, 1));
}

TEST_CASE("dataset_subset keeps rows and labels aligned") {
  const lrvm::Dataset d = test_support::make_blobs(10, 4.0, 8);
  const lrvm::Dataset s = lrvm::dataset_subset(d, {3, 17, 0});
  REQUIRE(s.size() == 3);
  REQUIRE(s.features.row(0) == d.features.row(3));
  REQUIRE(s.features.row(1) == d.features.row(17));
  REQUIRE(s.labels == std::vector<int>{d.labels[3], d.labels[17], d.labels[0]});
  REQUIRE(s.class_count == d.class_count);
}

TEST_CASE("validate_dataset flags inconsistent containers") {
  lrvm::Dataset d = test_support::make_blobs(5, 2.0, 1);
  REQUIRE_NOTHROW(lrvm::validate_dataset(d));
  d.labels.push_back(0);
  REQUIRE_THROWS(lrvm::validate_dataset(d));
  d.labels.pop_back();
  d.labels[0] = 7;
  REQUIRE_THROWS(lrvm::validate_dataset(d));
}
