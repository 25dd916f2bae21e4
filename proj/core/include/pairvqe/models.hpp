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

#ifndef PAIRVQE_MODELS_HPP_
#define PAIRVQE_MODELS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pairvqe/pauli.hpp"

namespace pairvqe {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Assignment of spatial orbitals (ascending energy) to qubits.
///
/// Occupied orbitals sit on odd qubits and virtual orbitals on even qubits, so the
/// Hartree-Fock reference is |0101...01>. Qubit 2k+1 holds occupied orbital k and
/// qubit 2k holds virtual orbital n/2 + k.
struct OrbitalOrdering {
  std::vector<int> qubit_of_orbital;
  std::vector<int> orbital_of_qubit;

  int size() const { return static_cast<int>(qubit_of_orbital.size()); }
};

OrbitalOrdering interleaved_ordering(int num_orbitals);

/// Bitmask with every odd qubit set.
uint64_t hartree_fock_bits(int num_qubits);

/// Single-particle energies p - (n+1)/2 for p = 1..n.
std::vector<double> rg_single_particle_energies(int num_orbitals);

/// Seniority-zero Hamiltonian written in qubit labels.
///
/// Orbital-level input: diag[p] multiplies N_p, pair_int(p, q) for p < q multiplies
/// N_p N_q, hop(p, q) multiplies P+_p P_q (p != q, symmetric) and hop(p, p) multiplies
/// P+_p P_p. N_p maps to 1 - Z_p and P+_p P_q + h.c. to (X_p X_q + Y_p Y_q)/2.
PauliSum pair_hamiltonian(std::span<const double> diag, const Eigen::MatrixXd& pair_int,
                          const Eigen::MatrixXd& hop, const OrbitalOrdering& ordering);

/// Richardson-Gaudin model sum_p eps_p N_p + g sum_{p != q} P+_p P_q.
PauliSum rg_hamiltonian(int num_orbitals, double g, const OrbitalOrdering& ordering);
PauliSum rg_hamiltonian(int num_orbitals, double g);

/// Integrals of the seniority-zero electronic structure Hamiltonian.
struct SeniorityZeroSpec {
  int num_orbitals = 0;
  std::vector<double> h;  // h_pp
  Eigen::MatrixXd coulomb;   // V_pqpq
  Eigen::MatrixXd exchange;  // V_pqqp
  Eigen::MatrixXd pair;      // V_ppqq

  explicit SeniorityZeroSpec(int n = 0);
  /// Throws ModelError on non-finite values or asymmetric integrals (tolerance 1e-10).
  void validate() const;

  /// Line format: "norb N", then "h p v", "Vpqpq p q v", "Vpqqp p q v", "Vppqq p q v".
  /// Orbital indices are zero-based; symmetric partners are filled automatically.
  static SeniorityZeroSpec parse(std::string_view text);
  std::string to_text() const;
};

/// sum_p h_pp N_p + 1/4 sum_{p != q} (2 V_pqpq - V_pqqp) N_p N_q + sum_{pq} V_ppqq P+_p P_q.
/// The p = q pair term contributes V_pppp (1 - Z_p)/2.
PauliSum chem_hamiltonian(const SeniorityZeroSpec& spec, const OrbitalOrdering& ordering);
PauliSum chem_hamiltonian(const SeniorityZeroSpec& spec);

/// Computational basis states of n qubits with the given Hamming weight, ascending.
std::vector<uint64_t> sector_basis(int num_qubits, int weight);

/// Dense matrix of h restricted to a set of basis states (h must preserve their span).
Eigen::MatrixXd sector_matrix(const PauliSum& h, std::span<const uint64_t> basis);

struct DociResult {
  double energy = 0;
  std::vector<uint64_t> basis;
  Eigen::VectorXd ground_state;
  Eigen::VectorXd spectrum;
};

/// Exact diagonalization in the sector of num_pairs occupied pairs. Supports n <= 14.
DociResult doci_solve(const PauliSum& h, int num_pairs);

/// Delta = (2/n) sum_j sqrt(n_j - n_j^2) over spatial-orbital occupations.
/// Values in [-0.05, 0.05) and (1, 1.05] are clipped; anything further out throws.
double order_parameter(std::span<const double> occupations);
/// d Delta / d n for a single spin orbital: (1/2n)(1 - 2n_j)/sqrt(n_j - n_j^2).
double order_parameter_spin_derivative(double occupation, int num_orbitals);
/// Occupations n_j = (1 - <Z_j>)/2.
std::vector<double> occupations_from_z(std::span<const double> z_expectations);

/// D+-_ij = (Z_i + Z_j +- (X_i X_j + Y_i Y_j))/2.
PauliSum d_plus(int num_qubits, int i, int j);
PauliSum d_minus(int num_qubits, int i, int j);

enum class MeasurementScheme { kTermwise, kXXplusYY, kXXYYIZZI };

MeasurementScheme parse_scheme(std::string_view name);
std::string scheme_name(MeasurementScheme scheme);

/// A quantity read off as the parity of logical bits in a measurement group.
struct GroupObservable {
  PauliSum op;             // operator in logical qubit labels
  uint64_t logical_zmask;  // parity mask in the rotated logical frame
};

/// Terms read from a single measurement setting.
struct MeasurementGroup {
  enum class Kind { kComputational, kPairRotated, kTermBasis };
  Kind kind = Kind::kComputational;
  int setting = -1;                        // index into the ladder settings, pair groups only
  std::vector<std::pair<int, int>> pairs;  // logical pairs rotated by GS(pi/4)
  PauliString basis_term;                  // measured term, termwise groups only
  std::vector<GroupObservable> observables;
  bool number_preserving = true;
};

/// Splits h into measurement groups. The pair schemes use the ladder measurement settings
/// for an n-qubit ansatz with the given number of layers; logical pairs are reported in
/// the orbital frame of the input Hamiltonian.
std::vector<MeasurementGroup> group_terms(const PauliSum& h, MeasurementScheme scheme, int layers);

/// Operators measured individually by echo verification: Z_i, Z_i Z_j and D+_ij.
std::vector<PauliSum> xxyy_izzi_operators(const PauliSum& h);

}  // namespace pairvqe

#endif  // PAIRVQE_MODELS_HPP_
