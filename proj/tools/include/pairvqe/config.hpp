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

#ifndef PAIRVQE_CONFIG_HPP_
#define PAIRVQE_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pairvqe/mitigation.hpp"
#include "pairvqe/models.hpp"
#include "pairvqe/optimizer.hpp"
#include "pairvqe/simulator.hpp"

namespace pairvqe {

/// Invalid or inconsistent experiment configuration; the message lists every problem.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kEnergySweep, kScalingStudy, kOptimization, kPauliErrorHistogram };

ExperimentKind parse_experiment(std::string_view name);
std::string experiment_name(ExperimentKind kind);

struct ModelSpec {
  std::string kind = "rg";  // rg or chemistry
  int num_qubits = 4;
  std::string file;         // integrals for chemistry
  bool operator==(const ModelSpec&) const = default;
};

struct ParameterSpec {
  std::string source = "reference";  // reference, file or zero
  std::string file;                  // "{g}" is replaced by the coupling
  bool operator==(const ParameterSpec&) const = default;
};

struct NoiseSpec {
  std::string preset;  // empty when every field is explicit
  NoiseModel model;
  bool operator==(const NoiseSpec& o) const;
};

struct ShotSpec {
  uint64_t per_circuit = 0;  // 0 is the infinite-shot limit
  double target_variance = 0.1;
  bool operator==(const ShotSpec&) const = default;
};

struct SimulationSpec {
  std::string mode = "auto";
  int trajectories = 2000;
  bool operator==(const SimulationSpec&) const = default;
};

struct OptimizerSpec {
  std::string algorithm = "cmgd";  // cmgd or mgd
  std::string cost_method = "PS";
  double perturbation = 0.25;
  int max_iterations = 12;
  double learning_rate = 0.15;
  double sample_radius = 1.0;
  int evaluations = 0;  // 0 selects the default for the parameter count
  double rate_decay = 0.2;
  double stability = 0;
  double radius_decay = 0;
  bool operator==(const OptimizerSpec&) const = default;
};

struct HistogramSpec {
  int bins = 20;
  double max_error = 0.2;
  bool operator==(const HistogramSpec&) const = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kEnergySweep;
  ModelSpec model;
  std::vector<double> g_values = {-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2};
  int layers = -1;
  ParameterSpec parameters;
  NoiseSpec noise;
  std::vector<Method> methods = {Method::kRaw, Method::kPS, Method::kEV};
  MeasurementScheme scheme = MeasurementScheme::kXXplusYY;
  ShotSpec shots;
  SimulationSpec simulation;
  std::vector<int> scaling_qubits = {6, 8, 10, 12};
  OptimizerSpec optimizer;
  HistogramSpec histogram;
  uint64_t seed = 1;
  int workers = 1;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Named noise models: noiseless and paper_like.
NoiseModel noise_preset(std::string_view name);
std::vector<std::string> noise_preset_names();

/// Named experiment configurations: rg4, rg6, rg8 and rg10 energy sweeps.
ExperimentConfig config_preset(std::string_view name);
std::vector<std::string> config_preset_names();

/// Throws ConfigError listing every violation found.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys and bad values are errors.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Hash of the canonical serialization, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

SimulationOptions simulation_options(const ExperimentConfig& config, uint64_t seed);
CmgdConfig cmgd_config(const OptimizerSpec& spec, int num_parameters);

/// One parameter per line, layer-major.
std::vector<double> read_parameters(const std::string& path);
void write_parameters(const std::string& path, const std::vector<double>& theta);

}  // namespace pairvqe

#endif  // PAIRVQE_CONFIG_HPP_
