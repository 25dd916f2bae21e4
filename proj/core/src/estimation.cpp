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

#include "pairvqe/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pairvqe/models.hpp"
#include "pairvqe/rng.hpp"

namespace pairvqe {

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m, double rcond) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = s.size() ? rcond * s(0) : 0.0;
  Eigen::VectorXd inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > cutoff ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double constraint_residual(const CoefficientProblem& problem, const Eigen::VectorXd& c) {
  if (problem.h.size() == 0) return 0;
  return (problem.q.transpose() * c - problem.h).cwiseAbs().maxCoeff();
}

Eigen::VectorXd optimal_coefficients(const CoefficientProblem& problem, double tol) {
  const Eigen::MatrixXd& q = problem.q;
  if (q.cols() != problem.h.size()) throw EstimationError("q and h disagree on the number of Pauli terms");
  Eigen::VectorXd c;
  if (problem.sigma.size() == 0) {
    c = q * pseudoinverse(q.transpose() * q) * problem.h;
  } else {
    if (problem.sigma.rows() != q.rows() || problem.sigma.cols() != q.rows()) {
      throw EstimationError("covariance has the wrong shape");
    }
    const Eigen::MatrixXd sinv_q = problem.sigma.ldlt().solve(q);
    c = sinv_q * pseudoinverse(q.transpose() * sinv_q) * problem.h;
  }
  const double res = constraint_residual(problem, c);
  if (!(res <= tol * std::max(1.0, problem.h.cwiseAbs().maxCoeff()))) {
    throw EstimationError("target is not spanned by the measured operators (residual " + std::to_string(res) + ")");
  }
  return c;
}

double propagate_energy_variance(const Eigen::VectorXd& c, const Eigen::MatrixXd& sigma) {
  return c.dot(sigma * c);
}

LinearCombination decompose_target(const PauliSum& target, std::span<const PauliSum> measured,
                                   const Eigen::MatrixXd& sigma) {
  std::map<PauliString, Eigen::Index> column;
  auto index_of = [&](const PauliString& p) {
    auto it = column.find(p);
    if (it == column.end()) it = column.emplace(p, static_cast<Eigen::Index>(column.size())).first;
    return it->second;
  };
  for (const auto& [p, c] : target.terms()) {
    if (!p.is_identity()) index_of(p);
  }
  for (const PauliSum& m : measured) {
    for (const auto& [p, c] : m.terms()) {
      if (!p.is_identity()) index_of(p);
    }
  }
  CoefficientProblem prob;
  prob.q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(measured.size()), static_cast<Eigen::Index>(column.size()));
  prob.h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(column.size()));
  for (size_t i = 0; i < measured.size(); ++i) {
    for (const auto& [p, c] : measured[i].terms()) {
      if (!p.is_identity()) prob.q(static_cast<Eigen::Index>(i), column.at(p)) = c;
    }
  }
  for (const auto& [p, c] : target.terms()) {
    if (!p.is_identity()) prob.h(column.at(p)) = c;
  }
  prob.sigma = sigma;
  LinearCombination lc;
  lc.coefficients = optimal_coefficients(prob);
  lc.residual = constraint_residual(prob, lc.coefficients);
  lc.offset = target.constant();
  for (size_t i = 0; i < measured.size(); ++i) lc.offset -= lc.coefficients(static_cast<Eigen::Index>(i)) * measured[i].constant();
  return lc;
}

std::pair<double, double> combine(const LinearCombination& lc, std::span<const double> values,
                                  const Eigen::MatrixXd& sigma) {
  if (static_cast<Eigen::Index>(values.size()) != lc.coefficients.size()) throw EstimationError("value count mismatch");
  double e = lc.offset;
  for (size_t i = 0; i < values.size(); ++i) e += lc.coefficients(static_cast<Eigen::Index>(i)) * values[i];
  const double var = sigma.size() ? propagate_energy_variance(lc.coefficients, sigma) : 0.0;
  return {e, var};
}

double delta_occupation_derivative(double occupation, int num_orbitals) {
  return 2 * order_parameter_spin_derivative(occupation, num_orbitals);
}

DeltaEstimate propagate_delta_variance(std::span<const double> occupations, std::span<const double> variances) {
  if (occupations.size() != variances.size()) throw EstimationError("occupation and variance counts differ");
  DeltaEstimate d;
  d.value = order_parameter(occupations);
  const int n = static_cast<int>(occupations.size());
  for (size_t j = 0; j < occupations.size(); ++j) {
    const double occ = occupations[j];
    if (!(occ > 0 && occ < 1)) {
      d.divergent = true;
      continue;
    }
    const double der = delta_occupation_derivative(occ, n);
    d.variance += der * der * variances[j];
  }
  if (d.divergent) d.variance = std::numeric_limits<double>::infinity();
  return d;
}

EvCounts reconstruct_ev_counts(double signal, double fidelity, double overlap_abs, double shots) {
  EvCounts c;
  c.m_zero = shots * (1 - fidelity * overlap_abs * overlap_abs);
  c.m_plus = (shots - c.m_zero + shots * signal) / 2;
  c.m_minus = (shots - c.m_zero - shots * signal) / 2;
  const double low = std::min(c.m_plus, c.m_minus);
  if (low < 0) {
    // Shift |min| from M0 into both outcomes: the total and M+ - M- stay fixed.
    c.m_plus += -low;
    c.m_minus += -low;
    c.m_zero -= -2 * low;
  }
  return c;
}

BootstrapResult bootstrap(std::span<const Histogram> histograms, int resamples,
                          const std::function<double(std::span<const Histogram>)>& estimator, uint64_t seed) {
  if (resamples < 2) throw EstimationError("bootstrap needs at least two resamples");
  Rng rng = make_stream(seed, stable_hash("bootstrap"));
  std::vector<double> values;
  std::vector<Histogram> boot(histograms.begin(), histograms.end());
  for (int r = 0; r < resamples; ++r) {
    for (size_t k = 0; k < histograms.size(); ++k) {
      const Histogram& h = histograms[k];
      std::vector<double> dist;
      for (const auto& [b, w] : h.entries) dist.push_back(w);
      const auto shots = static_cast<uint64_t>(std::llround(h.shots > 0 ? h.shots : h.total()));
      if (shots == 0) continue;
      const MeasurementRecord rec = sample_distribution(dist, 64, shots, rng);
      boot[k].entries.clear();
      for (const auto& [i, c] : rec.counts) boot[k].entries.emplace_back(h.entries[i].first, static_cast<double>(c));
      boot[k].shots = static_cast<double>(shots);
    }
    values.push_back(estimator(boot));
  }
  BootstrapResult res;
  res.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double var = 0;
  for (double v : values) var += (v - res.mean) * (v - res.mean);
  res.std = std::sqrt(var / static_cast<double>(values.size() - 1));
  return res;
}

AllocationScheme parse_allocation_scheme(std::string_view name) {
  if (name == "uniform") return AllocationScheme::kUniform;
  if (name == "weights" || name == "coefficients") return AllocationScheme::kWeights;
  throw EstimationError("unknown allocation scheme '" + std::string(name) + "'");
}

std::vector<uint64_t> allocate_shots(std::span<const double> weights, uint64_t budget, AllocationScheme scheme,
                                     uint64_t quantum) {
  const size_t n = weights.size();
  if (n == 0) throw EstimationError("no groups to allocate shots to");
  if (quantum == 0) quantum = 1;
  std::vector<double> w(n, 1.0);
  if (scheme == AllocationScheme::kWeights) {
    for (size_t i = 0; i < n; ++i) {
      if (!(weights[i] >= 0)) throw EstimationError("negative allocation weight");
      w[i] = weights[i];
    }
  }
  const double total_w = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total_w > 0)) throw EstimationError("allocation weights sum to zero");
  const uint64_t units = budget / quantum;
  std::vector<uint64_t> out(n);
  std::vector<std::pair<double, size_t>> remainders;
  uint64_t used = 0;
  for (size_t i = 0; i < n; ++i) {
    const double exact = static_cast<double>(units) * w[i] / total_w;
    out[i] = static_cast<uint64_t>(std::floor(exact));
    used += out[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t k = 0; used < units; ++k, ++used) ++out[remainders[k % n].second];
  for (auto& v : out) v *= quantum;
  return out;
}

double group_weight(std::span<const double> coefficients) {
  double s = 0;
  for (double c : coefficients) s += c * c;
  return std::sqrt(s);
}

ShotPlan lagrangian_allocation(std::span<const double> sigmas, std::span<const double> coefficients,
                               double target_variance) {
  if (sigmas.size() != coefficients.size()) throw EstimationError("sigma and coefficient counts differ");
  if (!(target_variance > 0)) throw EstimationError("target variance must be positive");
  double s = 0;
  for (size_t i = 0; i < sigmas.size(); ++i) s += std::abs(coefficients[i]) * sigmas[i];
  ShotPlan plan;
  for (size_t i = 0; i < sigmas.size(); ++i) {
    plan.shots.push_back(std::abs(coefficients[i]) * sigmas[i] * s / target_variance);
  }
  plan.total = s * s / target_variance;
  return plan;
}

double wall_clock(double calls, double circuits, double shots) { return calls * 1.0 + circuits * 0.042 + shots * 5e-5; }

int circuit_count(Method method, int num_qubits, HamiltonianKind kind) {
  const int n = num_qubits;
  switch (method) {
    case Method::kRaw:
    case Method::kPS:
      return n + 1;
    case Method::kEV:
      return kind == HamiltonianKind::kChemistry ? 12 * n * n : 6 * n * n + 6 * n;
    case Method::kVD:
    case Method::kPSVD:
      return kind == HamiltonianKind::kChemistry ? 2 * n : n + 1;
  }
  return 0;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw EstimationError("power-law fit needs at least two points");
  const size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw EstimationError("power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace pairvqe
