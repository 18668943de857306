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
#ifndef LRVM_COMMANDS_HPP_
#define LRVM_COMMANDS_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lrvm/classifiers.hpp"
#include "lrvm/common.hpp"
#include "lrvm/dataset.hpp"
#include "lrvm/eval.hpp"
#include "lrvm/kernel.hpp"
#include "lrvm/local.hpp"
#include "lrvm/ranking.hpp"

namespace lrvm {

/// Raised for unusable configs and unreadable inputs; the CLI maps it to
/// exit code 2 (computational failures map to 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key=value file: '#' lines are comments, keys are unique, anything
/// else is rejected.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key(detail::trim(trimmed.substr(0, eq)));
    const std::string value(detail::trim(trimmed.substr(eq + 1)));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return kv;
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto sep = s.find(';', start);
    const auto end = sep == std::string::npos ? s.size() : sep;
    const std::string item(trim(std::string_view(s).substr(start, end - start)));
    if (!item.empty()) out.push_back(item);
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  return out;
}

inline long parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: '" + s + "'");
  }
}

inline double parse_real(const std::string& s, const std::string& key) {
  double v = 0.0;
  if (!parse_double(s, v))
    throw ConfigError("config key '" + key + "': not a number: '" + s + "'");
  return v;
}

inline void reject_unknown_keys(const std::map<std::string, std::string>& kv,
                                const std::vector<std::string>& allowed) {
  for (const auto& [key, value] : kv)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown config key '" + key + "'");
}

/// Generic CSV reader: header cells plus raw data rows (used to re-parse
/// every artifact the commands emit).
inline std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>>
read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>> out;
  out.first = split_csv_line(line);
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != out.first.size())
      throw std::runtime_error("ragged csv row in " + path);
    out.second.push_back(std::move(cells));
  }
  return out;
}

inline double cell_real(const std::vector<std::string>& row, std::size_t i,
                        const std::string& path) {
  double v = 0.0;
  if (!parse_double(row.at(i), v))
    throw std::runtime_error("non-numeric cell '" + row.at(i) + "' in " + path);
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CvResult round-trip files: one row per (run, fold) with the chosen
// hyperparameters and cost counters repeated per row.

inline void save_cv_csv(const std::string& path, const CvResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cv report: " + path);
  out << "run,fold,accuracy,k,gamma,mean_model_size,mean_iterations\n";
  for (Eigen::Index r = 0; r < result.fold_accuracy.rows(); ++r)
    for (Eigen::Index f = 0; f < result.fold_accuracy.cols(); ++f)
      out << r << ',' << f << ',' << detail::format_double(result.fold_accuracy(r, f))
          << ',' << result.k << ',' << detail::format_double(result.gamma) << ','
          << detail::format_double(result.mean_model_size) << ','
          << detail::format_double(result.mean_iterations) << '\n';
}

inline CvResult load_cv_csv(const std::string& path) {
  const auto [header, rows] = detail::read_csv_rows(path);
  const std::vector<std::string> expected = {
      "run", "fold", "accuracy", "k", "gamma", "mean_model_size", "mean_iterations"};
  if (header != expected) throw std::runtime_error("unexpected cv header in " + path);
  if (rows.empty()) throw std::runtime_error("cv report has no rows: " + path);

  Eigen::Index runs = 0, folds = 0;
  for (const auto& row : rows) {
    runs = std::max(runs, static_cast<Eigen::Index>(detail::cell_real(row, 0, path)) + 1);
    folds = std::max(folds, static_cast<Eigen::Index>(detail::cell_real(row, 1, path)) + 1);
  }
  CvResult result;
  result.fold_accuracy.resize(runs, folds);
  result.fold_accuracy.setConstant(std::numeric_limits<double>::quiet_NaN());
  for (const auto& row : rows) {
    const auto r = static_cast<Eigen::Index>(detail::cell_real(row, 0, path));
    const auto f = static_cast<Eigen::Index>(detail::cell_real(row, 1, path));
    result.fold_accuracy(r, f) = detail::cell_real(row, 2, path);
    result.k = static_cast<int>(detail::cell_real(row, 3, path));
    result.gamma = detail::cell_real(row, 4, path);
    result.mean_model_size = detail::cell_real(row, 5, path);
    result.mean_iterations = detail::cell_real(row, 6, path);
  }
  if (!result.fold_accuracy.allFinite())
    throw std::runtime_error("cv report misses (run, fold) cells: " + path);
  result.mean_accuracy = result.fold_accuracy.mean();
  return result;
}

// ---------------------------------------------------------------------------
// bench

struct BenchConfig {
  std::vector<std::string> dataset_paths;
  std::vector<std::string> classifiers;  // subset of {lrvm, rvm-global, knn}
  int runs = 10;
  int folds = 10;
  int kmax = 71;
  std::vector<double> gammas = default_gamma_grid();
  unsigned threads = 1;
  int label_column = kLastColumn;
  std::uint64_t seed = 0;
  std::string out_dir;
};

inline BenchConfig make_bench_config(const std::map<std::string, std::string>& kv,
                                     std::uint64_t seed, const std::string& out_dir) {
  detail::reject_unknown_keys(kv, {"datasets", "classifiers", "runs", "folds",
                                   "kmax", "gammas", "threads", "label_column"});
  BenchConfig cfg;
  cfg.seed = seed;
  cfg.out_dir = out_dir;

  const auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("datasets")) cfg.dataset_paths = detail::split_list(*v);
  if (cfg.dataset_paths.empty())
    throw ConfigError("config needs 'datasets' with at least one path");

  if (const auto* v = get("classifiers")) cfg.classifiers = detail::split_list(*v);
  if (cfg.classifiers.empty())
    throw ConfigError("config needs 'classifiers' with at least one entry");
  for (const auto& c : cfg.classifiers)
    if (c != "lrvm" && c != "rvm-global" && c != "knn")
      throw ConfigError("unknown classifier '" + c + "' (use lrvm, rvm-global, knn)");

  if (const auto* v = get("runs")) cfg.runs = static_cast<int>(detail::parse_int(*v, "runs"));
  if (cfg.runs < 1) throw ConfigError("'runs' must be >= 1");
  if (const auto* v = get("folds")) cfg.folds = static_cast<int>(detail::parse_int(*v, "folds"));
  if (cfg.folds < 2) throw ConfigError("'folds' must be >= 2");
  if (const auto* v = get("kmax")) cfg.kmax = static_cast<int>(detail::parse_int(*v, "kmax"));
  if (cfg.kmax < 1) throw ConfigError("'kmax' must be >= 1");
  if (const auto* v = get("gammas")) {
    cfg.gammas.clear();
    for (const auto& item : detail::split_list(*v))
      cfg.gammas.push_back(detail::parse_real(item, "gammas"));
  }
  if (cfg.gammas.empty()) throw ConfigError("'gammas' must be non-empty");
  for (double g : cfg.gammas)
    if (!(g > 0.0)) throw ConfigError("'gammas' entries must be positive");
  if (const auto* v = get("threads")) {
    const long t = detail::parse_int(*v, "threads");
    if (t < 1) throw ConfigError("'threads' must be >= 1");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (const auto* v = get("label_column"))
    cfg.label_column = static_cast<int>(detail::parse_int(*v, "label_column"));
  return cfg;
}

namespace detail {

inline GridSpec bench_grid(const std::string& classifier, const BenchConfig& cfg) {
  GridSpec grid;
  if (classifier == "lrvm") {
    for (int k = 1; k <= cfg.kmax; ++k) grid.k_values.push_back(k);
    grid.gamma_values = cfg.gammas;
  } else if (classifier == "knn") {
    for (int k = 1; k <= cfg.kmax; k += 2) grid.k_values.push_back(k);
    grid.gamma_values = {1.0};  // ignored by the distance vote
  } else {  // rvm-global: only gamma matters
    grid.k_values = {1};
    grid.gamma_values = cfg.gammas;
  }
  return grid;
}

inline FamilyFactory bench_family(const std::string& classifier, const BenchConfig& cfg) {
  if (classifier == "lrvm")
    return [threads = cfg.threads](int k, double gamma) -> std::unique_ptr<Classifier> {
      return std::make_unique<LrvmClassifier>(k, gamma, threads);
    };
  if (classifier == "knn")
    return [](int k, double) -> std::unique_ptr<Classifier> {
      return std::make_unique<KnnClassifier>(k);
    };
  return [](int, double gamma) -> std::unique_ptr<Classifier> {
    return std::make_unique<GlobalRvmClassifier>(gamma);
  };
}

}  // namespace detail

/// Grid-search + final repeated CV for every (dataset, classifier) cell.
/// Per-cell reports land as <dataset>_<classifier>_cv.csv, the combined
/// matrix as accuracy_matrix.csv; failed cells become NaN in the matrix and
/// flip the exit code to 1.
inline int cmd_bench(const BenchConfig& cfg, std::ostream& log) {
  std::filesystem::create_directories(cfg.out_dir);

  std::vector<Dataset> datasets;
  for (const auto& path : cfg.dataset_paths) {
    try {
      datasets.push_back(load_csv(path, cfg.label_column));
    } catch (const std::exception& e) {
      throw ConfigError("dataset '" + path + "': " + e.what());
    }
  }

  AccuracyTable matrix;
  matrix.classifiers = cfg.classifiers;
  for (const auto& d : datasets) matrix.datasets.push_back(d.name);
  matrix.values.resize(static_cast<Eigen::Index>(datasets.size()),
                       static_cast<Eigen::Index>(cfg.classifiers.size()));
  matrix.values.setConstant(std::numeric_limits<double>::quiet_NaN());

  int failures = 0;
  for (std::size_t di = 0; di < datasets.size(); ++di) {
    for (std::size_t ci = 0; ci < cfg.classifiers.size(); ++ci) {
      const auto& name = cfg.classifiers[ci];
      const std::uint64_t cell_seed = mix_seed(mix_seed(cfg.seed, di), ci);
      try {
        const GridSpec grid = detail::bench_grid(name, cfg);
        const FamilyFactory family = detail::bench_family(name, cfg);
        const GridChoice choice = grid_search(family, datasets[di], grid, cfg.folds,
                                              mix_seed(cell_seed, 0));
        CvResult final = run_cv([&] { return family(choice.k, choice.gamma); },
                                datasets[di], cfg.runs, cfg.folds,
                                mix_seed(cell_seed, 1));
        final.k = choice.k;
        final.gamma = choice.gamma;

        const auto report = std::filesystem::path(cfg.out_dir) /
                            (datasets[di].name + "_" + name + "_cv.csv");
        save_cv_csv(report.string(), final);
        matrix.values(static_cast<Eigen::Index>(di), static_cast<Eigen::Index>(ci)) =
            final.mean_accuracy;
        log << datasets[di].name << " / " << name << ": accuracy "
            << detail::format_double(final.mean_accuracy) << " (k=" << final.k
            << ", gamma=" << detail::format_double(final.gamma) << ")\n";
      } catch (const std::exception& e) {
        ++failures;
        log << datasets[di].name << " / " << name << ": FAILED: " << e.what() << '\n';
      }
    }
  }

  const auto matrix_path = std::filesystem::path(cfg.out_dir) / "accuracy_matrix.csv";
  save_accuracy_csv(matrix_path.string(), matrix);
  return failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// stats

struct StatsConfig {
  std::string accuracy_csv;
  double cv_alpha = 0.0;
  std::string out_dir;
};

/// Friedman/Nemenyi analysis of an accuracy matrix. Emits
/// friedman_ranks.csv, friedman_stats.csv, friedman_groups.csv and a text
/// rendering on the log stream.
inline int cmd_stats(const StatsConfig& cfg, std::ostream& log) {
  if (cfg.cv_alpha < 0.0) throw ConfigError("cv_alpha must be >= 0");
  AccuracyTable table;
  try {
    table = load_accuracy_csv(cfg.accuracy_csv);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  FriedmanReport rep;
  try {
    rep = friedman_report(table.values, cfg.cv_alpha);
  } catch (const std::exception& e) {
    throw ConfigError("accuracy table '" + cfg.accuracy_csv + "': " + e.what());
  }
  const int L = static_cast<int>(table.values.rows());
  const int G = static_cast<int>(table.values.cols());

  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path out(cfg.out_dir);
  {
    std::ofstream f(out / "friedman_ranks.csv");
    f << "position,classifier,avg_rank\n";
    for (std::size_t p = 0; p < rep.groups.order.size(); ++p) {
      const int c = rep.groups.order[p];
      f << p << ',' << table.classifiers[static_cast<std::size_t>(c)] << ','
        << detail::format_double(rep.avg_ranks(c)) << '\n';
    }
  }
  {
    std::ofstream f(out / "friedman_stats.csv");
    f << "stat,value\n";
    f << "datasets," << L << '\n';
    f << "classifiers," << G << '\n';
    f << "chi2_f," << detail::format_double(rep.chi2_f) << '\n';
    f << "f_defined," << (rep.f_defined ? 1 : 0) << '\n';
    f << "f_f,"
      << detail::format_double(rep.f_defined ? rep.f_f
                                             : std::numeric_limits<double>::quiet_NaN())
      << '\n';
    f << "cv_alpha," << detail::format_double(rep.cv_alpha) << '\n';
    f << "cd," << detail::format_double(rep.cd) << '\n';
  }
  {
    std::ofstream f(out / "friedman_groups.csv");
    f << "group,first,last\n";
    for (std::size_t g = 0; g < rep.groups.ranges.size(); ++g)
      f << g << ',' << rep.groups.ranges[g].first << ',' << rep.groups.ranges[g].second
        << '\n';
  }

  log << "classifiers by average rank:\n";
  for (int c : rep.groups.order)
    log << "  " << table.classifiers[static_cast<std::size_t>(c)] << "  "
        << detail::format_double(rep.avg_ranks(c)) << '\n';
  log << "chi2_F = " << detail::format_double(rep.chi2_f) << '\n';
  if (rep.f_defined)
    log << "F_f = " << detail::format_double(rep.f_f) << '\n';
  else
    log << "F_f = undefined (denominator <= 0)\n";
  log << "CD(cv_alpha=" << detail::format_double(rep.cv_alpha) << ") = "
      << detail::format_double(rep.cd) << '\n';
  for (const auto& [first, last] : rep.groups.ranges) {
    log << "group:";
    for (int p = first; p <= last; ++p)
      log << ' '
          << table.classifiers[static_cast<std::size_t>(
                 rep.groups.order[static_cast<std::size_t>(p)])];
    log << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// boundary

struct BoundaryConfig {
  std::string generator;     // "ripley" or empty when a dataset path is given
  std::string dataset_path;  // 2-D CSV
  int n = 250;               // generated points (both classes together)
  std::string classifier = "rvm-global";  // rvm-global or lrvm
  double gamma = 0.5;
  int k = 3;
  bool normalize = false;
  int label_column = kLastColumn;
  int grid_x = 50;
  int grid_y = 50;
  std::uint64_t seed = 0;
  std::string out_dir;
};

inline BoundaryConfig make_boundary_config(const std::map<std::string, std::string>& kv,
                                           std::uint64_t seed, const std::string& out_dir,
                                           const std::string& grid_spec) {
  detail::reject_unknown_keys(kv, {"generator", "dataset", "n", "classifier", "gamma",
                                   "k", "normalize", "label_column"});
  BoundaryConfig cfg;
  cfg.seed = seed;
  cfg.out_dir = out_dir;

  const auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("generator")) cfg.generator = *v;
  if (const auto* v = get("dataset")) cfg.dataset_path = *v;
  if (cfg.generator.empty() == cfg.dataset_path.empty())
    throw ConfigError("config needs exactly one of 'generator' or 'dataset'");
  if (!cfg.generator.empty() && cfg.generator != "ripley")
    throw ConfigError("unknown generator '" + cfg.generator + "' (only ripley)");

  if (const auto* v = get("n")) cfg.n = static_cast<int>(detail::parse_int(*v, "n"));
  if (cfg.n < 2 || cfg.n % 2 != 0) throw ConfigError("'n' must be even and >= 2");
  if (const auto* v = get("classifier")) cfg.classifier = *v;
  if (cfg.classifier != "rvm-global" && cfg.classifier != "lrvm")
    throw ConfigError("boundary classifier must be rvm-global or lrvm");
  if (const auto* v = get("gamma")) cfg.gamma = detail::parse_real(*v, "gamma");
  if (!(cfg.gamma > 0.0)) throw ConfigError("'gamma' must be positive");
  if (const auto* v = get("k")) cfg.k = static_cast<int>(detail::parse_int(*v, "k"));
  if (cfg.k < 1) throw ConfigError("'k' must be >= 1");
  if (const auto* v = get("normalize")) {
    const long b = detail::parse_int(*v, "normalize");
    if (b != 0 && b != 1) throw ConfigError("'normalize' must be 0 or 1");
    cfg.normalize = b == 1;
  }
  if (const auto* v = get("label_column"))
    cfg.label_column = static_cast<int>(detail::parse_int(*v, "label_column"));

  // "40" means a 40x40 grid; "40x30" sets the axes separately.
  const auto x = grid_spec.find('x');
  try {
    if (x == std::string::npos) {
      cfg.grid_x = cfg.grid_y = static_cast<int>(detail::parse_int(grid_spec, "grid"));
    } else {
      cfg.grid_x = static_cast<int>(detail::parse_int(grid_spec.substr(0, x), "grid"));
      cfg.grid_y = static_cast<int>(detail::parse_int(grid_spec.substr(x + 1), "grid"));
    }
  } catch (const ConfigError&) {
    throw ConfigError("bad --grid value '" + grid_spec + "' (use N or NxM)");
  }
  if (cfg.grid_x < 1 || cfg.grid_y < 1) throw ConfigError("grid resolution must be >= 1");
  return cfg;
}

namespace detail {

inline double lin(double lo, double hi, int i, int n) {
  if (n == 1) return (lo + hi) / 2.0;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace detail

/// Decision surface export: boundary_grid.csv holds (x1, x2, probability,
/// predicted) over the data bounding box with a 10% margin;
/// boundary_model.csv lists the surviving training points and iteration
/// counts as (record, a, b) rows -- "rv"/"iterations" per global model,
/// "query"/"lrv" per grid query for the localized machine.
inline int cmd_boundary(const BoundaryConfig& cfg, std::ostream& log) {
  Dataset data;
  if (!cfg.generator.empty()) {
    data = gen_ripley(cfg.n / 2, cfg.seed);
  } else {
    try {
      data = load_csv(cfg.dataset_path, cfg.label_column);
    } catch (const std::exception& e) {
      throw ConfigError("dataset '" + cfg.dataset_path + "': " + e.what());
    }
  }
  if (data.dim() != 2)
    throw ConfigError("boundary needs 2-D data, got " + std::to_string(data.dim()) +
                      " features");
  if (cfg.normalize) {
    const NormStats norm = zscore_fit(data);
    data.features = zscore_apply(norm, data.features);
  }

  const double min_x = data.features.col(0).minCoeff();
  const double max_x = data.features.col(0).maxCoeff();
  const double min_y = data.features.col(1).minCoeff();
  const double max_y = data.features.col(1).maxCoeff();
  const double margin_x = 0.1 * (max_x - min_x);
  const double margin_y = 0.1 * (max_y - min_y);

  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path out(cfg.out_dir);
  std::ofstream grid_file(out / "boundary_grid.csv");
  std::ofstream model_file(out / "boundary_model.csv");
  if (!grid_file || !model_file)
    throw ConfigError("cannot write into output directory " + cfg.out_dir);
  grid_file << "x1,x2,probability,predicted\n";
  model_file << "record,a,b\n";

  const auto prob_of = [&](const Vector& probs, int predicted) {
    return data.class_count == 2 ? probs(1) : probs(predicted);
  };

  if (cfg.classifier == "rvm-global") {
    const GlobalRvmModels models = fit_global_rvm(data, cfg.gamma);
    for (std::size_t m = 0; m < models.models.size(); ++m) {
      for (Eigen::Index row : models.rv_indices[m])
        model_file << "rv," << models.positives[m] << ',' << row << '\n';
      model_file << "iterations," << models.positives[m] << ','
                 << models.reports[m].outer_iterations << '\n';
      log << "global model (positive class " << models.positives[m] << "): "
          << models.rv_indices[m].size() << " RVs, "
          << models.reports[m].outer_iterations << " iterations\n";
    }
    for (int i = 0; i < cfg.grid_x; ++i)
      for (int j = 0; j < cfg.grid_y; ++j) {
        Eigen::RowVector2d p(detail::lin(min_x - margin_x, max_x + margin_x, i, cfg.grid_x),
                             detail::lin(min_y - margin_y, max_y + margin_y, j, cfg.grid_y));
        Vector probs;
        const int predicted = predict_global(models, p, &probs);
        grid_file << detail::format_double(p(0)) << ',' << detail::format_double(p(1))
                  << ',' << detail::format_double(prob_of(probs, predicted)) << ','
                  << predicted << '\n';
      }
  } else {
    const GramTable table = build_gram(data.features, cfg.gamma);
    LrvmConfig lc;
    lc.k = cfg.k;
    lc.gamma = cfg.gamma;
    RowMatrix queries(cfg.grid_x * cfg.grid_y, 2);
    for (int i = 0; i < cfg.grid_x; ++i)
      for (int j = 0; j < cfg.grid_y; ++j) {
        queries(i * cfg.grid_y + j, 0) =
            detail::lin(min_x - margin_x, max_x + margin_x, i, cfg.grid_x);
        queries(i * cfg.grid_y + j, 1) =
            detail::lin(min_y - margin_y, max_y + margin_y, j, cfg.grid_y);
      }
    const BatchResult batch = classify_batch(queries, data, table, lc);
    for (const auto& [row, what] : batch.errors)
      log << "query " << row << " failed: " << what << '\n';
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
      const LocalPrediction& pred = batch.predictions[static_cast<std::size_t>(q)];
      const double prob =
          pred.predicted_class < 0 ? std::numeric_limits<double>::quiet_NaN()
                                   : prob_of(pred.probabilities, pred.predicted_class);
      grid_file << detail::format_double(queries(q, 0)) << ','
                << detail::format_double(queries(q, 1)) << ','
                << detail::format_double(prob) << ',' << pred.predicted_class << '\n';
      model_file << "query," << q << ',' << pred.iterations << '\n';
      for (Eigen::Index row : pred.lrv_rows) model_file << "lrv," << q << ',' << row << '\n';
    }
    return batch.errors.empty() ? 0 : 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Readers for the remaining emitted artifacts.

struct BoundaryGrid {
  RowMatrix points;  // n x 2
  Vector probability;
  std::vector<int> predicted;
};

inline BoundaryGrid load_boundary_grid(const std::string& path) {
  const auto [header, rows] = detail::read_csv_rows(path);
  const std::vector<std::string> expected = {"x1", "x2", "probability", "predicted"};
  if (header != expected) throw std::runtime_error("unexpected grid header in " + path);
  BoundaryGrid g;
  g.points.resize(static_cast<Eigen::Index>(rows.size()), 2);
  g.probability.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    g.points(r, 0) = detail::cell_real(rows[i], 0, path);
    g.points(r, 1) = detail::cell_real(rows[i], 1, path);
    g.probability(r) = detail::cell_real(rows[i], 2, path);
    g.predicted.push_back(static_cast<int>(detail::cell_real(rows[i], 3, path)));
  }
  return g;
}

struct BoundaryModelRecord {
  std::string kind;  // rv | iterations | query | lrv
  long a = 0;
  long b = 0;
};

inline std::vector<BoundaryModelRecord> load_boundary_model(const std::string& path) {
  const auto [header, rows] = detail::read_csv_rows(path);
  const std::vector<std::string> expected = {"record", "a", "b"};
  if (header != expected) throw std::runtime_error("unexpected model header in " + path);
  std::vector<BoundaryModelRecord> out;
  for (const auto& row : rows)
    out.push_back({row[0], static_cast<long>(detail::cell_real(row, 1, path)),
                   static_cast<long>(detail::cell_real(row, 2, path))});
  return out;
}

inline std::vector<std::pair<std::string, double>> load_stat_csv(const std::string& path) {
  const auto [header, rows] = detail::read_csv_rows(path);
  const std::vector<std::string> expected = {"stat", "value"};
  if (header != expected) throw std::runtime_error("unexpected stats header in " + path);
  std::vector<std::pair<std::string, double>> out;
  for (const auto& row : rows) out.emplace_back(row[0], detail::cell_real(row, 1, path));
  return out;
}

// ---------------------------------------------------------------------------
// Entry points used by the CLI binary; map ConfigError (and any other
// escape) to exit code 2.

inline int dispatch_bench(const std::string& config_path, std::uint64_t seed,
                          const std::string& out_dir, std::ostream& log,
                          std::ostream& err) {
  try {
    return cmd_bench(make_bench_config(parse_config_file(config_path), seed, out_dir), log);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

inline int dispatch_stats(const std::string& accuracy_csv, double cv_alpha,
                          const std::string& out_dir, std::ostream& log,
                          std::ostream& err) {
  try {
    return cmd_stats({accuracy_csv, cv_alpha, out_dir}, log);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

inline int dispatch_boundary(const std::string& config_path, std::uint64_t seed,
                             const std::string& out_dir, const std::string& grid_spec,
                             std::ostream& log, std::ostream& err) {
  try {
    return cmd_boundary(
        make_boundary_config(parse_config_file(config_path), seed, out_dir, grid_spec), log);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace lrvm

#endif  // LRVM_COMMANDS_HPP_
