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

#ifndef PAIRVQE_CIRCUITS_HPP_
#define PAIRVQE_CIRCUITS_HPP_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pairvqe/models.hpp"
#include "pairvqe/pauli.hpp"

namespace pairvqe {

class CircuitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GateKind {
  kGS,         // SWAP . Givens(theta)
  kCZ,
  kSWAP,
  kPhasedXZ,   // exp(i(az+aa)Z) exp(i ax X) exp(-i aa Z)
  kVirtualZ,   // exp(i beta Z), no duration
  kSqrtSWAP,   // params[0] = +1 or -1 for the inverse
  kSqrtISWAP,  // params[0] = +1 or -1 for the inverse
  kCNOT,       // q0 controls q1
  kZZPhase,    // exp(i alpha Z Z)
};

struct Gate {
  GateKind kind = GateKind::kGS;
  int q0 = 0;
  int q1 = -1;
  std::array<double, 3> params{};

  static Gate gs(int i, int j, double theta) { return {GateKind::kGS, i, j, {theta, 0, 0}}; }
  static Gate cz(int i, int j) { return {GateKind::kCZ, i, j, {}}; }
  static Gate swap(int i, int j) { return {GateKind::kSWAP, i, j, {}}; }
  static Gate cnot(int c, int t) { return {GateKind::kCNOT, c, t, {}}; }
  static Gate zz_phase(int i, int j, double alpha) { return {GateKind::kZZPhase, i, j, {alpha, 0, 0}}; }
  static Gate sqrt_swap(int i, int j, bool inverse = false) {
    return {GateKind::kSqrtSWAP, i, j, {inverse ? -1.0 : 1.0, 0, 0}};
  }
  static Gate sqrt_iswap(int i, int j, bool inverse = false) {
    return {GateKind::kSqrtISWAP, i, j, {inverse ? -1.0 : 1.0, 0, 0}};
  }
  static Gate phased_xz(int q, double ax, double aa, double az) {
    return {GateKind::kPhasedXZ, q, -1, {ax, aa, az}};
  }
  static Gate virtual_z(int q, double beta) { return {GateKind::kVirtualZ, q, -1, {beta, 0, 0}}; }

  bool is_two_qubit() const { return q1 >= 0; }
  bool is_virtual() const { return kind == GateKind::kVirtualZ; }
  Gate inverse() const;
  bool operator==(const Gate& o) const { return kind == o.kind && q0 == o.q0 && q1 == o.q1 && params == o.params; }
};

std::string gate_name(GateKind kind);

/// 2x2 matrix of a single-qubit gate.
Eigen::Matrix2cd single_qubit_matrix(const Gate& g);
/// 4x4 matrix of a two-qubit gate in the basis |q0 q1>, q0 the more significant bit.
Eigen::Matrix4cd two_qubit_matrix(const Gate& g);

using Layer = std::vector<Gate>;

/// Layered circuit on a fixed register. Gates within a layer act on disjoint qubits.
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int num_qubits) : n_(num_qubits) {}

  int num_qubits() const { return n_; }
  const std::vector<Layer>& layers() const { return layers_; }
  size_t depth() const { return layers_.size(); }
  /// Number of layers holding at least one two-qubit gate.
  size_t two_qubit_depth() const;
  size_t gate_count() const;
  size_t two_qubit_gate_count() const;

  /// Appends a layer after checking qubit ranges and disjointness.
  void append(Layer layer);
  void append(const Circuit& other);
  Circuit inverse() const;
  /// Copy with every qubit index q replaced by map[q], on a register of width num_qubits.
  Circuit relabeled(std::span<const int> map, int num_qubits) const;

  /// One layer per line: gates as NAME(q0[,q1][;p0,p1,p2]) separated by spaces.
  std::string dump() const;
  static Circuit parse(std::string_view text, int num_qubits);

 private:
  int n_ = 0;
  std::vector<Layer> layers_;
};

/// Dense unitary, basis index bit q = qubit q. Limited to 12 qubits.
Eigen::MatrixXcd circuit_unitary(const Circuit& c);
/// Embeds a gate into an n-qubit unitary.
Eigen::MatrixXcd gate_unitary(const Gate& g, int num_qubits);
/// min over phases of max |a - e^{i phi} b|.
double distance_up_to_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// ---------------------------------------------------------------------------
// UpCCD ansatz on a ring of GS gates.

int default_layers(int num_qubits);
int num_parameters(int num_qubits, int layers);
/// Qubit pairs of layer l, cyclically shifted by shift.
std::vector<std::pair<int, int>> layer_pairs(int num_qubits, int layer, int shift = 0);
/// theta is layer-major with num_qubits/2 entries per layer.
Circuit build_upccd(int num_qubits, int layers, std::span<const double> theta, int shift = 0);
/// Physical position of every logical qubit after the ansatz (including the shift).
std::vector<int> ansatz_output_positions(int num_qubits, int layers, int shift = 0);
/// Logical pairs acted on by each gate, in application order.
std::vector<std::pair<int, int>> excitation_schedule(int num_qubits, int layers);

/// A ladder measurement setting: ansatz shift, optional top-row SWAP layer and the logical
/// pairs that end up on the cross links (i, n-1-i). The first member of each pair sits at i.
struct MeasurementSetting {
  int shift = 0;
  bool swap_layer = false;
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> position;  // logical qubit -> physical qubit before the GS(pi/4) layer
  std::vector<std::pair<int, int>> swaps;
};

std::vector<MeasurementSetting> ladder_measurement_settings(int num_qubits, int layers);

enum class CircuitMode { kLogical, kLayoutAware };

CircuitMode parse_circuit_mode(std::string_view name);

/// Ansatz followed by the basis change of a measurement group.
struct MeasuredCircuit {
  Circuit circuit;
  uint64_t initial_bits = 0;
  std::vector<int> position;  // logical qubit -> measured physical qubit
  uint64_t physical_mask(uint64_t logical_mask) const;
  uint64_t logical_bits(uint64_t physical_bits) const;
};

MeasuredCircuit build_measurement_circuit(int num_qubits, int layers, std::span<const double> theta,
                                          const MeasurementGroup& group, CircuitMode mode);

/// Basis changes R with R^dag Z R equal to +X, -X, +Y, -Y.
enum class TomographyBasis { kPlusX, kMinusX, kPlusY, kMinusY };
Gate tomography_rotation(int qubit, TomographyBasis basis);
/// Gate with R|0> = (|0> + |1>)/sqrt(2).
Gate hadamard_like(int qubit);

// ---------------------------------------------------------------------------
// Native decompositions of GS(theta).

enum class NativeGateSet { kCZ, kSqrtSWAP, kSqrtISWAP };

NativeGateSet parse_native_gate_set(std::string_view name);

/// Layers implementing GS(theta) on (i, j) up to global phase.
std::vector<Layer> decompose_gs(int i, int j, double theta, NativeGateSet set);
/// Replaces every GS gate; other gates pass through.
Circuit compile_to_native(const Circuit& c, NativeGateSet set);

// ---------------------------------------------------------------------------
// Dual-rail gadgets with |0~> = |01>, |1~> = |10>.

Gate dual_rail_x(int i, int j);
Gate dual_rail_z(int i, int j);
Gate dual_rail_h(int i, int j);
/// GS(0) . GS(theta) on one rail pair (q0, q1): a real rotation of the logical qubit.
Circuit dual_rail_ry(double theta);
/// Logical CNOT on rails (0,1) control and (2,3) target.
Circuit dual_rail_cnot();
/// Logical SWAP of rails (0,1) and (2,3) using nearest-neighbour GS(0) only.
Circuit dual_rail_swap();

// ---------------------------------------------------------------------------
// Echo verification.

/// Which echo-verification operator: Z_a, Z_a Z_b or D+_ab in logical labels.
struct EvOperator {
  enum class Kind { kZ, kZZ, kDPlus, kIdentity };
  Kind kind = Kind::kZ;
  int a = -1;
  int b = -1;

  PauliSum pauli(int num_qubits) const;
  static EvOperator from_pauli(const PauliSum& op);
  std::string name() const;
};

/// Layer boundaries of an echo circuit: cat prep and ansatz occupy [0, head_end), the
/// operator mapping [head_end, op_layer), O^alpha is layer op_layer and the basis change
/// is the final layer.
struct EvCircuit {
  Circuit circuit;
  size_t head_end = 0;
  size_t op_layer = 0;
  PauliString op_pauli;  // Z string applied by O^alpha in the physical frame
  bool op_virtual = true;
  int measurement_qubit = 0;
  /// Sign o_phi with O|0...0> = o_phi |0...0>.
  double reference_sign = 1.0;
};

EvCircuit build_ev_circuit(int num_qubits, int layers, std::span<const double> theta, const EvOperator& op,
                           double alpha, TomographyBasis basis);

/// Number of EV circuits for a Hamiltonian: 12 per operator.
int ev_circuit_count(const PauliSum& h);

// ---------------------------------------------------------------------------
// Virtual distillation.

/// Two copies of the ansatz on qubits [0, n) and [n, 2n), a shared measurement mapping
/// and GS(pi/4) between identified qubits.
struct VdCircuit {
  Circuit circuit;
  uint64_t initial_bits = 0;
  /// The per-register part repeated on both copies, and the layers acting after it.
  Circuit register_circuit;
  uint64_t register_bits = 0;
  Circuit tail;
  int num_qubits = 0;                     // per register
  std::vector<int> position;             // logical qubit -> register-physical qubit after mapping
  std::vector<int> first;                // register-physical m -> measured bit of copy one
  std::vector<int> second;               // register-physical m -> measured bit of copy two
  uint64_t postselect_mask = 0;
  enum class Symmetry { kNumber, kParity } symmetry = Symmetry::kNumber;
  int postselect_value = 0;              // total weight, or parity 0/1
  std::vector<GroupObservable> observables;  // mapped to single-bit masks in the logical frame
};

/// Logical pairs mapped with CNOT(a -> b) for Z_a Z_b terms, in disjoint rounds.
std::vector<std::vector<std::pair<int, int>>> zz_rounds(const PauliSum& h);

/// VD groups: the measurement groups of the pair scheme plus CNOT-mapped rounds for Z_a Z_b.
struct VdGroup {
  MeasurementGroup base;
  std::vector<std::pair<int, int>> cnot_pairs;
};

std::vector<VdGroup> vd_groups(const PauliSum& h, int layers);

VdCircuit build_vd_circuit(int num_qubits, int layers, std::span<const double> theta, const VdGroup& group,
                           CircuitMode mode);

}  // namespace pairvqe

#endif  // PAIRVQE_CIRCUITS_HPP_
