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

#ifndef PAIRVQE_ESTIMATION_HPP_
#define PAIRVQE_ESTIMATION_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pairvqe/mitigation.hpp"
#include "pairvqe/pauli.hpp"

namespace pairvqe {

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rows are measured operators Q_i, columns Pauli strings P_j; h holds the target
/// coefficients and sigma the covariance of the Q_i estimates (empty means identity).
struct CoefficientProblem {
  Eigen::MatrixXd q;
  Eigen::VectorXd h;
  Eigen::MatrixXd sigma;
};

/// Moore-Penrose pseudoinverse; singular values below rcond * sigma_max count as zero.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m, double rcond = 1e-10);

/// c = S^-1 q (q^T S^-1 q)^+ h with S = sigma or the identity. Throws when
/// max_j |sum_i c_i q_ij - h_j| exceeds tol (h outside the row space of q).
Eigen::VectorXd optimal_coefficients(const CoefficientProblem& problem, double tol = 1e-9);

/// max_j |(c^T q)_j - h_j|.
double constraint_residual(const CoefficientProblem& problem, const Eigen::VectorXd& c);

/// c^T sigma c.
double propagate_energy_variance(const Eigen::VectorXd& c, const Eigen::MatrixXd& sigma);

/// Expresses target - constant as sum_i c_i (Q_i - constant of Q_i).
struct LinearCombination {
  Eigen::VectorXd coefficients;
  double offset = 0;  // target constant minus sum_i c_i (constant of Q_i)
  double residual = 0;
};

LinearCombination decompose_target(const PauliSum& target, std::span<const PauliSum> measured,
                                   const Eigen::MatrixXd& sigma = Eigen::MatrixXd());

/// offset + c . values and c^T sigma c.
std::pair<double, double> combine(const LinearCombination& lc, std::span<const double> values,
                                  const Eigen::MatrixXd& sigma);

struct DeltaEstimate {
  double value = 0;
  double variance = 0;
  bool divergent = false;  // some occupation sits on the boundary 0 or 1
};

/// d Delta / d n_j for a spatial orbital: both spin orbitals share n_j.
double delta_occupation_derivative(double occupation, int num_orbitals);

/// Delta from spatial occupations and the delta-method variance sum_j (dDelta/dn_j)^2 Var(n_j).
DeltaEstimate propagate_delta_variance(std::span<const double> occupations, std::span<const double> variances);

/// Echo counts consistent with a measurement-qubit expectation: M0 = M (1 - F |U|^2),
/// M+- = (M - M0 +- M signal)/2, with negative counts moved through M0.
struct EvCounts {
  double m_plus = 0;
  double m_minus = 0;
  double m_zero = 0;
};

EvCounts reconstruct_ev_counts(double signal, double fidelity, double overlap_abs, double shots);

struct BootstrapResult {
  double mean = 0;
  double std = 0;
};

/// Resamples every histogram multinomially from its own frequencies.
BootstrapResult bootstrap(std::span<const Histogram> histograms, int resamples,
                          const std::function<double(std::span<const Histogram>)>& estimator, uint64_t seed);

enum class AllocationScheme { kUniform, kWeights };

AllocationScheme parse_allocation_scheme(std::string_view name);

/// Budget split by largest remainder; quantum > 1 rounds every share down to a multiple first.
std::vector<uint64_t> allocate_shots(std::span<const double> weights, uint64_t budget, AllocationScheme scheme,
                                     uint64_t quantum = 1);

/// Weight of a jointly measured group: the Euclidean norm of its coefficients.
double group_weight(std::span<const double> coefficients);

struct ShotPlan {
  std::vector<double> shots;  // real-valued optimum
  double total = 0;
};

/// m_i proportional to |c_i| sigma_i, scaled so that sum_i c_i^2 sigma_i^2 / m_i = target.
ShotPlan lagrangian_allocation(std::span<const double> sigmas, std::span<const double> coefficients,
                               double target_variance);

/// a calls at 1 s, b distinct circuits at 0.042 s and c shots at 5e-5 s.
double wall_clock(double calls, double circuits, double shots);

enum class HamiltonianKind { kRichardsonGaudin, kChemistry };

/// Distinct circuits per energy evaluation.
int circuit_count(Method method, int num_qubits, HamiltonianKind kind);

struct PowerLawFit {
  double exponent = 0;
  double prefactor = 0;
  double r_squared = 0;
};

/// Least-squares line through (log x, log y).
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace pairvqe

#endif  // PAIRVQE_ESTIMATION_HPP_
