// Copyright 2026 The pairvqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fmt/format.h>

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "pairvqe/experiments.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pair-ansatz VQE experiments with error mitigation"};
  std::string config_path, out_dir = "results", preset;
  int64_t seed = -1;
  int workers = 0;
  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--preset", preset, "Built-in configuration: rg4, rg6, rg8 or rg10");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Override the configured seed")->check(CLI::NonNegativeNumber);
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  bool list = false;
  app.add_flag("--list-presets", list, "Print preset names and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (list) {
    for (const auto& p : pairvqe::config_preset_names()) std::cout << p << "\n";
    return 0;
  }

  pairvqe::ExperimentConfig config;
  try {
    if (config_path.empty() == preset.empty()) throw pairvqe::ConfigError("give exactly one of --config and --preset");
    config = preset.empty() ? pairvqe::load_config(config_path) : pairvqe::config_preset(preset);
    if (seed >= 0) config.seed = static_cast<uint64_t>(seed);
    if (workers > 0) config.workers = workers;
    pairvqe::validate(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const auto tables = pairvqe::run_experiment(config);
    pairvqe::write_outputs(out_dir, config, tables);
    for (const auto& t : tables) std::cout << fmt::format("wrote {}/{}.csv ({} rows)\n", out_dir, t.name, t.rows.size());
  } catch (const pairvqe::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumericError;
  }
  return 0;
}
