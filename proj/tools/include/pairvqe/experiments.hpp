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

#ifndef PAIRVQE_EXPERIMENTS_HPP_
#define PAIRVQE_EXPERIMENTS_HPP_

#include <string>
#include <vector>

#include "pairvqe/config.hpp"
#include "pairvqe/pauli.hpp"

namespace pairvqe {

/// Result table; cells are already formatted.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// CSV with a commented metadata header (version, seed, config hash).
  std::string to_csv(const ExperimentConfig& config) const;
  size_t column(const std::string& name) const;
};

/// Shortest round-trip text of a double.
std::string format_number(double v);

std::string version_string();

PauliSum experiment_hamiltonian(const ExperimentConfig& config, int num_qubits, double g);
/// Noiseless quasi-Newton optimum of the ansatz energy from theta = 0.
std::vector<double> reference_parameters(const PauliSum& h, int layers);
std::vector<double> experiment_parameters(const ExperimentConfig& config, const PauliSum& h, int layers, double g);

/// One row per (g, method): g, method, energy, energy_std, delta, delta_std, doci_energy,
/// noiseless_upccd_energy, keep_fraction, fidelity.
Table run_energy_sweep(const ExperimentConfig& config);

/// Per (N, method) errors, fidelity, shots and wall clock, plus power-law fits over N.
std::vector<Table> run_scaling_study(const ExperimentConfig& config);

/// CMGD or MGD trace from perturbed reference parameters, plus a summary with the final
/// echo-verified energy.
std::vector<Table> run_optimization(const ExperimentConfig& config);

/// Binned |estimate - exact| over every measured operator, per method.
std::vector<Table> run_pauli_error_histogram(const ExperimentConfig& config);

std::vector<Table> run_experiment(const ExperimentConfig& config);

/// Writes every table as <name>.csv and the resolved config as config.json.
void write_outputs(const std::string& directory, const ExperimentConfig& config, const std::vector<Table>& tables);

}  // namespace pairvqe

#endif  // PAIRVQE_EXPERIMENTS_HPP_
