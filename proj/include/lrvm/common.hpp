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
#ifndef LRVM_COMMON_HPP_
#define LRVM_COMMON_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace lrvm {

// Row = instance throughout; keeps per-row scans contiguous.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Counter-based 64-bit generator (splitmix64). Self-contained so that
/// shuffles and samples are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound) via Lemire's multiply-shift.
  std::uint64_t uniform_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform double in (0, 1].
  double uniform01() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (no cached spare; two uniforms per draw).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from (base, salt).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  Rng r(base ^ (0xD1B54A32D192ED03ULL * (salt + 1)));
  return r.next();
}

/// Runs fn(i) for i in [0, n). Work is sharded statically over `threads`
/// workers; fn must write results only to slot i so that the outcome is
/// identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline unsigned default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace lrvm

#endif  // LRVM_COMMON_HPP_
