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

#ifndef PAIRVQE_PAULI_HPP_
#define PAIRVQE_PAULI_HPP_

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pairvqe {

using cplx = std::complex<double>;

inline constexpr int kMaxPauliQubits = 64;

/// Raised for malformed labels, qubit-count mismatches and non-Hermitian results.
class PauliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor product of single-qubit Paulis with a phase i^k.
///
/// Qubit q is stored in bit q of the x and z masks; the operator on qubit q is
/// I (0,0), X (1,0), Z (0,1) or Y (1,1). Labels print qubit 0 first.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int num_qubits);
  PauliString(int num_qubits, uint64_t x, uint64_t z, int phase = 0);

  /// Parses "XIZY", optionally prefixed by "+", "-", "i", "+i" or "-i".
  static PauliString from_label(std::string_view label);
  static PauliString single(int num_qubits, int qubit, char op);
  /// Product of Z on every qubit set in mask.
  static PauliString z_string(int num_qubits, uint64_t mask);

  int num_qubits() const { return n_; }
  uint64_t x_mask() const { return x_; }
  uint64_t z_mask() const { return z_; }
  /// Power of i multiplying the tensor product, in {0,1,2,3}.
  int phase() const { return phase_; }

  char at(int qubit) const;
  void set(int qubit, char op);

  /// Label without phase, qubit 0 first.
  std::string label() const;
  /// Label with a phase prefix when the phase is not +1.
  std::string to_string() const;

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  bool is_diagonal() const { return x_ == 0; }
  int weight() const;
  PauliString without_phase() const { return PauliString(n_, x_, z_, 0); }

  PauliString operator*(const PauliString& other) const;
  bool commutes(const PauliString& other) const;
  bool qubitwise_commutes(const PauliString& other) const;

  /// Applies the operator to |basis>; writes the image index and returns the amplitude factor.
  cplx apply_to_basis(uint64_t basis, uint64_t* image) const;

  bool operator==(const PauliString& o) const {
    return n_ == o.n_ && x_ == o.x_ && z_ == o.z_ && phase_ == o.phase_;
  }
  bool operator!=(const PauliString& o) const { return !(*this == o); }
  /// Orders by qubit count, then masks, then phase.
  bool operator<(const PauliString& o) const;

 private:
  int n_ = 0;
  uint64_t x_ = 0;
  uint64_t z_ = 0;
  int phase_ = 0;
};

/// Real linear combination of phase-free Pauli strings, i.e. a Hermitian operator.
class PauliSum {
 public:
  using TermMap = std::map<PauliString, double>;

  PauliSum() = default;
  explicit PauliSum(int num_qubits) : n_(num_qubits) {}
  PauliSum(const PauliString& p, double coeff);

  int num_qubits() const { return n_; }
  const TermMap& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Adds coeff * p. The phase of p must be real (+1 or -1); it is folded into coeff.
  void add(const PauliString& p, double coeff);
  void add(std::string_view label, double coeff);
  double coefficient(const PauliString& p) const;
  /// Coefficient of the identity string.
  double constant() const;
  /// Copy without the identity term.
  PauliSum without_constant() const;
  /// Drops terms with |coeff| <= tol.
  PauliSum simplified(double tol = 1e-12) const;
  /// Relabels qubit q as perm[q].
  PauliSum permuted(std::span<const int> perm) const;
  /// Re-embeds into a register of width num_qubits starting at offset.
  PauliSum embedded(int num_qubits, int offset) const;

  double one_norm() const;
  bool is_diagonal() const;

  PauliSum operator+(const PauliSum& o) const;
  PauliSum operator-(const PauliSum& o) const;
  PauliSum operator*(double s) const;
  PauliSum& operator+=(const PauliSum& o);
  /// Operator product; throws PauliError if the product is not Hermitian within tol.
  PauliSum multiply(const PauliSum& o, double tol = 1e-10) const;

  /// One term per line as "coeff label"; shortest round-trip decimal form.
  std::string to_text() const;
  /// Parses to_text() output; blank lines and lines starting with '#' are skipped.
  static PauliSum from_text(std::string_view text);

 private:
  void check_width(int n) const;

  int n_ = 0;
  TermMap terms_;
};

/// Complex coefficients, used for commutators and other non-Hermitian intermediates.
using ComplexPauliMap = std::map<PauliString, cplx>;

ComplexPauliMap multiply_complex(const PauliSum& a, const PauliSum& b, double tol = 1e-14);
/// True when [a, b] vanishes up to tol in every coefficient.
bool commutes(const PauliSum& a, const PauliSum& b, double tol = 1e-10);

/// <psi|p|psi> for a state vector with 2^n amplitudes.
cplx expectation(const PauliString& p, std::span<const cplx> psi);
/// Tr[rho p] for a row-major density matrix of dimension 2^n.
cplx expectation_density(const PauliString& p, std::span<const cplx> rho);

/// <psi|h|psi>; throws PauliError if the imaginary residual exceeds 1e-10.
double expectation(const PauliSum& h, std::span<const cplx> psi);
double expectation_density(const PauliSum& h, std::span<const cplx> rho);

/// Applies h to psi, returning h|psi>.
std::vector<cplx> apply(const PauliSum& h, std::span<const cplx> psi);

/// Parity (-1)^{|bits & mask|}.
inline int z_parity(uint64_t bits, uint64_t mask) {
  return (__builtin_popcountll(bits & mask) & 1) ? -1 : 1;
}

}  // namespace pairvqe

#endif  // PAIRVQE_PAULI_HPP_
