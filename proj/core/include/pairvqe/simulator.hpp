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

#ifndef PAIRVQE_SIMULATOR_HPP_
#define PAIRVQE_SIMULATOR_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pairvqe/circuits.hpp"
#include "pairvqe/pauli.hpp"
#include "pairvqe/rng.hpp"

namespace pairvqe {

class SimulatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gate-attached depolarizing noise, per-layer damping, dephasing and background field,
/// readout bit flips and an optional global depolarizing channel at the end of a circuit.
struct NoiseModel {
  double p2 = 0;                 // depolarizing probability after each two-qubit gate
  double p1 = 0;                 // depolarizing probability after each non-virtual one-qubit gate
  double amplitude_damping = 0;  // gamma per qubit per layer
  double dephasing = 0;          // lambda per qubit per layer
  double field = 0;              // h: exp(i h sum_j Z_j) after each non-virtual layer
  double readout_p01 = 0;        // probability that 0 reads as 1
  double readout_p10 = 0;        // probability that 1 reads as 0
  double global_survival = 1;    // F: rho -> F rho + (1 - F) I / 2^n at the end

  /// Throws SimulatorError when a probability lies outside [0, 1] or is not finite.
  void validate() const;
  /// No stochastic channel (the field and readout may still be set).
  bool is_unitary() const;
  bool is_noiseless() const;
  bool pauli_only() const { return amplitude_damping == 0; }
  /// Noise with only the readout part removed.
  NoiseModel without_readout() const;
};

/// Depolarizing probability p applies a uniformly random Pauli (identity included), so
/// p = 1 fully depolarizes. Dephasing lambda applies Z with probability (1 - sqrt(1-lambda))/2.
double dephasing_flip_probability(double lambda);

struct SimulatorLimits {
  size_t max_pure_amplitudes = size_t{1} << 21;
  size_t max_density_dim = size_t{1} << 10;
};

class StateVector {
 public:
  StateVector() = default;
  StateVector(int num_qubits, uint64_t bits = 0, const SimulatorLimits& limits = {});

  int num_qubits() const { return n_; }
  size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::vector<cplx>& data() { return amps_; }

  void apply(const Gate& g);
  void apply(const Layer& layer);
  void apply(const Circuit& c);
  /// Phase-free Pauli X^x Z^z.
  void apply_pauli(uint64_t x, uint64_t z);
  /// exp(i h sum_j Z_j).
  void apply_field(double h);
  /// One quantum-jump step of amplitude damping on qubit q; u is uniform in [0,1).
  void amplitude_damp(int q, double gamma, double u);
  double norm_squared() const;
  void normalize();
  std::vector<double> probabilities() const;
  /// Tensor product with other on the high qubits.
  StateVector tensor(const StateVector& other, const SimulatorLimits& limits = {}) const;

 private:
  int n_ = 0;
  std::vector<cplx> amps_;
};

/// Row-major density matrix with entry index (row << n) | col.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(int num_qubits, uint64_t bits = 0, const SimulatorLimits& limits = {});
  static DensityMatrix from_state(const StateVector& psi, const SimulatorLimits& limits = {});

  int num_qubits() const { return n_; }
  size_t dim() const { return dim_; }
  std::span<const cplx> data() const { return rho_; }
  cplx at(size_t row, size_t col) const { return rho_[row * dim_ + col]; }

  void apply(const Gate& g);
  void apply(const Layer& layer);
  /// rho -> (1 - p) rho + p Tr_S(rho) (x) I / 2^|S| for S = {q0} or {q0, q1}.
  void depolarize(int q0, int q1, double p);
  void dephase(int q, double lambda);
  void amplitude_damp(int q, double gamma);
  void apply_field(double h);
  void global_depolarize(double survival);
  double trace() const;
  std::vector<double> probabilities() const;
  DensityMatrix tensor(const DensityMatrix& other, const SimulatorLimits& limits = {}) const;

 private:
  int n_ = 0;
  size_t dim_ = 0;
  std::vector<cplx> rho_;
};

/// Applies one layer with its noise to every state in states using shared random draws.
/// Requires Pauli-only noise when more than one state is given.
void apply_noisy_layer(std::span<StateVector* const> states, const Layer& layer, const NoiseModel& noise, Rng& rng);
void apply_noisy_layer(DensityMatrix& rho, const Layer& layer, const NoiseModel& noise);

/// One stochastic trajectory, including the global depolarizing channel.
void apply_circuit(StateVector& psi, const Circuit& c, const NoiseModel& noise, Rng& rng);
/// Exact channel evolution, including the global depolarizing channel.
void apply_circuit(DensityMatrix& rho, const Circuit& c, const NoiseModel& noise);

enum class SimulationMode { kAuto, kPure, kDensity };

SimulationMode parse_simulation_mode(std::string_view name);

struct SimulationOptions {
  SimulationMode mode = SimulationMode::kAuto;
  int trajectories = 200;
  uint64_t seed = 0;
  int workers = 1;
  /// Auto mode uses density matrices up to this many qubits when noise is stochastic.
  int auto_density_qubits = 8;
  SimulatorLimits limits;
};

/// Resolved mode: pure when the noise is unitary, else density if allowed, else trajectories.
SimulationMode resolve_mode(int num_qubits, const NoiseModel& noise, const SimulationOptions& options);

/// Outcome distribution before readout error. Trajectory mode averages the exact
/// distributions of options.trajectories trajectories; the global channel is applied exactly.
std::vector<double> output_distribution(const Circuit& c, uint64_t initial_bits, const NoiseModel& noise,
                                        const SimulationOptions& options, uint64_t circuit_id);

/// Independent per-bit flips applied to a distribution.
void apply_readout(std::vector<double>& dist, int num_qubits, double p01, double p10);

/// Runs fn(block, begin, end) over a fixed partition of [0, count) into blocks; the
/// partition depends only on count, so results merged by block index are deterministic.
void parallel_blocks(size_t count, int workers, const std::function<void(size_t, size_t, size_t)>& fn);
size_t num_blocks(size_t count);

/// Bitstring with qubit 0 first.
std::string bitstring(uint64_t bits, int width);
uint64_t parse_bitstring(std::string_view text);

/// Outcome counts of one circuit.
struct MeasurementRecord {
  std::string circuit_id;
  int width = 0;
  std::map<uint64_t, uint64_t> counts;
  std::map<std::string, std::string> metadata;

  uint64_t total() const;
  /// "# key value" metadata lines, then one "bitstring count" line per outcome.
  std::string to_text() const;
  static MeasurementRecord from_text(std::string_view text);
};

/// Multinomial sample of shots outcomes from a normalized distribution.
MeasurementRecord sample_distribution(std::span<const double> dist, int width, uint64_t shots, Rng& rng);
/// Samples a state with readout flips applied to each shot's outcome distribution.
MeasurementRecord sample(const StateVector& psi, uint64_t shots, double p01, double p10, uint64_t seed);
MeasurementRecord sample(const DensityMatrix& rho, uint64_t shots, double p01, double p10, uint64_t seed);

}  // namespace pairvqe

#endif  // PAIRVQE_SIMULATOR_HPP_
