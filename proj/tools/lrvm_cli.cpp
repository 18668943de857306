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
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lrvm/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Localized relevance vector machine toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  double cv_alpha = 0.0;
  std::string grid_spec = "50";

  auto* bench = app.add_subcommand(
      "bench", "Cross-validated benchmark over datasets and classifiers");
  bench->add_option("--config", config_path, "key=value benchmark config")->required();
  bench->add_option("--seed", seed, "base RNG seed")->required();
  bench->add_option("--out", out_dir, "output directory")->required();

  auto* stats = app.add_subcommand(
      "stats", "Friedman/Nemenyi statistics over an accuracy matrix CSV");
  stats->add_option("--config", config_path, "accuracy matrix CSV")->required();
  stats->add_option("--cv-alpha", cv_alpha, "Nemenyi critical value for the group count")
      ->required();
  stats->add_option("--out", out_dir, "output directory")->required();
  stats->add_option("--seed", seed, "accepted for interface symmetry; unused");

  auto* boundary = app.add_subcommand(
      "boundary", "Decision-surface grid export for a 2-D dataset");
  boundary->add_option("--config", config_path, "key=value boundary config")->required();
  boundary->add_option("--seed", seed, "base RNG seed")->required();
  boundary->add_option("--out", out_dir, "output directory")->required();
  boundary->add_option("--grid", grid_spec, "grid resolution, N or NxM (default 50)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (bench->parsed())
    return lrvm::dispatch_bench(config_path, seed, out_dir, std::cout, std::cerr);
  if (stats->parsed())
    return lrvm::dispatch_stats(config_path, cv_alpha, out_dir, std::cout, std::cerr);
  return lrvm::dispatch_boundary(config_path, seed, out_dir, grid_spec, std::cout,
                                 std::cerr);
}
