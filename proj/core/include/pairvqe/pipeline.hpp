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

#ifndef PAIRVQE_PIPELINE_HPP_
#define PAIRVQE_PIPELINE_HPP_

#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pairvqe/circuits.hpp"
#include "pairvqe/estimation.hpp"
#include "pairvqe/mitigation.hpp"
#include "pairvqe/models.hpp"
#include "pairvqe/simulator.hpp"

namespace pairvqe {

/// How an energy is measured: grouping, layout, shots and simulation backend.
struct EstimationSettings {
  MeasurementScheme scheme = MeasurementScheme::kXXplusYY;
  CircuitMode mode = CircuitMode::kLogical;
  int layers = -1;     // -1 selects num_qubits / 2
  uint64_t shots = 0;  // per circuit; 0 is the infinite-shot limit
  std::vector<double> alphas = {std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4};
  SimulationOptions sim;
  bool clip = true;
  int ev_resamples = 100;
};

struct OperatorEstimate {
  std::string name;
  PauliSum op;
  double value = 0;
  double variance = 0;
};

struct EnergyEstimate {
  Method method = Method::kRaw;
  double energy = 0;
  double variance = 0;
  std::vector<OperatorEstimate> operators;
  std::vector<double> z;      // <Z_q> per logical qubit
  std::vector<double> z_var;
  double fidelity = std::numeric_limits<double>::quiet_NaN();
  double keep_fraction = 1;
  double field = std::numeric_limits<double>::quiet_NaN();
  int circuits = 0;
  double shots = 0;
};

/// Energy of h for ansatz parameters theta under noise with one mitigation method.
EnergyEstimate estimate_energy(const PauliSum& h, std::span<const double> theta, Method method,
                               const NoiseModel& noise, const EstimationSettings& settings);

/// Order parameter from an estimate's <Z_q>, with delta-method variance.
DeltaEstimate estimate_delta(const EnergyEstimate& e);

/// Single-shot standard deviation of each measurement group's share of the energy,
/// sqrt(c^T Cov c) with Cov the exact one-shot covariance of the group's parities and c
/// the energy coefficients. Input to shot allocation.
std::vector<double> group_standard_deviations(const PauliSum& h, std::span<const double> theta,
                                              const NoiseModel& noise, const EstimationSettings& settings);

/// Noiseless ansatz state on the Hartree-Fock reference, in the physical frame: logical
/// qubit q ends on ansatz_output_positions(...)[q].
StateVector ansatz_state(int num_qubits, int layers, std::span<const double> theta);
double exact_energy(const PauliSum& h, int layers, std::span<const double> theta);

/// Echo readouts of one operator over all (alpha, basis) settings.
struct EvOperatorReadouts {
  EvOperator op;
  double reference_sign = 1;
  double field_multiplier = 0;
  std::vector<EvReadout> readouts;
};

/// Infinite-shot echo readout probabilities (readout error included). Pauli-only noise in
/// trajectory mode shares the state preparation across operators and handles alpha and
/// the tomography basis analytically; other cases simulate every circuit.
std::vector<EvOperatorReadouts> ev_readout_probabilities(int num_qubits, int layers, std::span<const double> theta,
                                                         std::span<const EvOperator> ops,
                                                         std::span<const double> alphas, const NoiseModel& noise,
                                                         const SimulationOptions& sim, bool force_generic = false);

/// Probability of the all-zeros outcome of the operator-free echo (readout error included).
double loschmidt_probability(int num_qubits, int layers, std::span<const double> theta, const NoiseModel& noise,
                             const SimulationOptions& sim);

/// Outcome distribution of a VD circuit before readout error, simulating the two copies
/// separately before the shared tail.
std::vector<double> vd_distribution(const VdCircuit& vd, const NoiseModel& noise, const SimulationOptions& sim,
                                    uint64_t circuit_id);

}  // namespace pairvqe

#endif  // PAIRVQE_PIPELINE_HPP_
