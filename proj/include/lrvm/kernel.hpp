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
#ifndef LRVM_KERNEL_HPP_
#define LRVM_KERNEL_HPP_

#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrvm/common.hpp"

namespace lrvm {

struct KernelConfig {
  double gamma = 1.0;  // k(x,z) = exp(-gamma * ||x-z||^2)
};

/// Precomputed train-by-train kernel matrix. Local models fetch their
/// k x k blocks from here by index instead of re-evaluating the kernel.
struct GramTable {
  RowMatrix values;
  double gamma = 0.0;
  Eigen::Index source_count = 0;
};

namespace detail {

// Plain scalar loop: both the table build and any later recomputation
// run the identical instruction sequence, so entries compare bit-equal.
inline double squared_distance(const double* x, const double* z, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = x[i] - z[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace detail

/// Gaussian kernel exp(-gamma * ||x-z||^2); range (0, 1], symmetric.
inline double gaussian_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                              const Eigen::Ref<const Eigen::RowVectorXd>& z,
                              double gamma) {
  if (x.size() != z.size())
    throw std::invalid_argument("gaussian_kernel: vector length mismatch");
  if (!(gamma > 0.0))
    throw std::invalid_argument("gaussian_kernel: gamma must be positive");
  const double v =
      std::exp(-gamma * detail::squared_distance(x.data(), z.data(), x.size()));
  // Keep the value strictly positive even when exp underflows.
  return v > 0.0 ? v : std::numeric_limits<double>::min();
}

/// Builds the full N x N table; each pair is evaluated once and mirrored.
inline GramTable build_gram(const RowMatrix& X, double gamma) {
  if (X.rows() < 1) throw std::invalid_argument("build_gram: empty input");
  GramTable t;
  t.gamma = gamma;
  t.source_count = X.rows();
  t.values.resize(X.rows(), X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    t.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < X.rows(); ++j) {
      const double v = gaussian_kernel(X.row(i), X.row(j), gamma);
      t.values(i, j) = v;
      t.values(j, i) = v;
    }
  }
  return t;
}

/// k x k block values[idx[a]][idx[b]]; bit-equal to rebuilding the kernel
/// over the selected rows.
inline RowMatrix submatrix(const GramTable& table, const std::vector<Eigen::Index>& idx) {
  const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (idx[a] < 0 || idx[a] >= table.source_count)
      throw std::out_of_range("submatrix: index " + std::to_string(idx[a]) +
                              " out of range");
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (idx[a] == idx[b])
        throw std::invalid_argument("submatrix: duplicate index " +
                                    std::to_string(idx[a]));
  }
  RowMatrix out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = table.values(idx[a], idx[b]);
  return out;
}

/// Kernel values between one query and each stored row.
inline Vector cross_kernel(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                           const RowMatrix& rows, double gamma) {
  Vector out(rows.rows());
  for (Eigen::Index j = 0; j < rows.rows(); ++j)
    out(j) = gaussian_kernel(x, rows.row(j), gamma);
  return out;
}

/// Binary cache: u64 row count, f64 gamma, then row-major f64 values.
inline void save_gram(const GramTable& table, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write gram cache: " + path);
  const std::uint64_t n = static_cast<std::uint64_t>(table.source_count);
  bool ok = std::fwrite(&n, sizeof n, 1, f) == 1 &&
            std::fwrite(&table.gamma, sizeof(double), 1, f) == 1 &&
            std::fwrite(table.values.data(), sizeof(double), n * n, f) == n * n;
  std::fclose(f);
  if (!ok) throw std::runtime_error("short write on gram cache: " + path);
}

inline GramTable load_gram(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot read gram cache: " + path);
  GramTable t;
  std::uint64_t n = 0;
  bool ok = std::fread(&n, sizeof n, 1, f) == 1 &&
            std::fread(&t.gamma, sizeof(double), 1, f) == 1;
  if (ok) {
    t.source_count = static_cast<Eigen::Index>(n);
    t.values.resize(t.source_count, t.source_count);
    ok = std::fread(t.values.data(), sizeof(double), n * n, f) == n * n;
  }
  std::fclose(f);
  if (!ok) throw std::runtime_error("truncated gram cache: " + path);
  return t;
}

}  // namespace lrvm

#endif  // LRVM_KERNEL_HPP_
