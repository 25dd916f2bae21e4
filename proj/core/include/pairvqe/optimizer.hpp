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

#ifndef PAIRVQE_OPTIMIZER_HPP_
#define PAIRVQE_OPTIMIZER_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pairvqe {

class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cost oracle; call_index numbers the evaluations so noisy oracles can seed themselves
/// independently of evaluation order.
using Oracle = std::function<double(const Eigen::VectorXd& x, uint64_t call_index)>;

struct QuadraticModel {
  Eigen::MatrixXd a;  // symmetric
  Eigen::VectorXd b;  // gradient at the center
  double c = 0;
};

/// Least-squares fit of f(center + d) = d^T A d + b^T d + c (minimum-norm when the
/// design is underdetermined). Throws with fewer than dim + 2 points.
QuadraticModel fit_quadratic_model(std::span<const Eigen::VectorXd> points, std::span<const double> values,
                                   const Eigen::VectorXd& center);

struct CmgdConfig {
  Eigen::VectorXd x0;
  double learning_rate = 0.15;     // gamma
  double sample_radius = 1.0;      // delta
  int max_iterations = 12;         // n
  int evaluations = 0;             // k
  double rate_decay = 0.2;         // alpha
  double stability = 0;            // A
  double radius_decay = 0;         // xi
  double tolerance = 1e-8;         // epsilon
  bool conjugate = true;           // false gives model gradient descent
  bool line_search = false;        // exact step along h using the fitted model
  int workers = 1;
};

/// delta = 1, gamma = 0.15, A = 0, k = round(0.409 (P+1)(P+2)), xi = 0, alpha = 0.2, n = 12.
CmgdConfig default_hyperparameters(int num_parameters);

struct CmgdIteration {
  int iteration = 0;
  Eigen::VectorXd x;     // point at which the model was fitted
  double value = 0;      // oracle value at x
  Eigen::VectorXd gradient;
  Eigen::VectorXd direction;
  double beta = 0;
  double step = 0;       // gamma'
  double radius = 0;     // delta'
  std::vector<double> samples;
};

struct CmgdResult {
  Eigen::VectorXd x;
  std::vector<CmgdIteration> trace;
  uint64_t oracle_calls = 0;
  bool converged = false;
};

CmgdResult cmgd_minimize(const Oracle& oracle, const CmgdConfig& config, uint64_t seed);
/// Model gradient descent: CMGD with beta fixed to zero.
CmgdResult mgd_minimize(const Oracle& oracle, CmgdConfig config, uint64_t seed);

/// CSV with columns iteration,energy,grad_norm,beta,gamma_eff,delta_eff.
std::string trace_csv(const CmgdResult& result);

struct ReferenceResult {
  Eigen::VectorXd x;
  double value = 0;
  double gradient_norm = 0;
  int iterations = 0;
};

/// Deterministic BFGS with central-difference gradients and backtracking line search.
/// Stops at the gradient tolerance or after three consecutive steps that lower f by less
/// than 1e-13 max(1, |f|), which is where difference-gradient noise takes over.
ReferenceResult reference_minimize(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                                   double gradient_tolerance = 1e-7, int max_iterations = 1000);

}  // namespace pairvqe

#endif  // PAIRVQE_OPTIMIZER_HPP_
