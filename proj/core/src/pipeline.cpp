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

#include "pairvqe/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace pairvqe {

namespace {

int num_qubits_of(const PauliSum& h) {
  if (h.num_qubits() <= 0) throw EstimationError("empty Hamiltonian");
  return h.num_qubits();
}

// Index q when op is exactly Z_q, else -1.
int single_z_index(const PauliSum& op) {
  const auto s = op.simplified();
  if (s.terms().size() != 1) return -1;
  const auto& [p, c] = *s.terms().begin();
  if (std::abs(c - 1) > 1e-12 || p.x_mask() != 0 || std::popcount(p.z_mask()) != 1) return -1;
  return std::countr_zero(p.z_mask());
}

Histogram to_histogram(std::vector<double> dist, int width, const NoiseModel& noise, uint64_t shots, uint64_t seed,
                       uint64_t circuit_id) {
  apply_readout(dist, width, noise.readout_p01, noise.readout_p10);
  if (shots == 0) return Histogram::from_distribution(dist, width, 1e-15);
  Rng rng = make_stream(seed, circuit_id, 1);
  return Histogram::from_record(sample_distribution(dist, width, shots, rng));
}

void finish(EnergyEstimate& e, const PauliSum& h, const Eigen::MatrixXd& sigma, bool clip) {
  std::vector<PauliSum> measured;
  std::vector<double> values;
  for (auto& o : e.operators) {
    if (clip) o.value = clip_expectation(o.value);
    measured.push_back(o.op);
    values.push_back(o.value);
  }
  const LinearCombination lc = decompose_target(h, measured);
  if (lc.residual > 1e-8) throw EstimationError("measured operators do not span the Hamiltonian");
  const auto [energy, variance] = combine(lc, values, sigma);
  e.energy = energy;
  e.variance = variance;
  const int n = num_qubits_of(h);
  e.z.assign(n, std::numeric_limits<double>::quiet_NaN());
  e.z_var.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (const auto& o : e.operators) {
    const int q = single_z_index(o.op);
    if (q >= 0 && std::isnan(e.z[q])) {
      e.z[q] = o.value;
      e.z_var[q] = o.variance;
    }
  }
}

EnergyEstimate estimate_grouped(const PauliSum& h, std::span<const double> theta, bool postselect_number,
                                const NoiseModel& noise, const EstimationSettings& s, int layers) {
  const int n = num_qubits_of(h);
  EnergyEstimate e;
  e.method = postselect_number ? Method::kPS : Method::kRaw;
  const auto groups = group_terms(h, s.scheme, layers);
  std::vector<std::pair<size_t, size_t>> blocks;  // operator range per group
  std::vector<Eigen::MatrixXd> covs;
  double keep_sum = 0;
  int keep_count = 0;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const MeasurementGroup& g = groups[gi];
    const MeasuredCircuit mc = build_measurement_circuit(n, layers, theta, g, s.mode);
    const uint64_t id = stable_hash("group:" + std::to_string(gi));
    Histogram hist = to_histogram(output_distribution(mc.circuit, mc.initial_bits, noise, s.sim, id), n, noise,
                                  s.shots, s.sim.seed, id);
    if (postselect_number && g.number_preserving) {
      double keep = 0;
      hist = postselect(hist, Symmetry::number(n, n / 2), &keep);
      keep_sum += keep;
      ++keep_count;
    }
    const size_t first = e.operators.size();
    std::vector<uint64_t> masks;
    for (const auto& obs : g.observables) {
      const uint64_t mask = mc.physical_mask(obs.logical_zmask);
      const MitigatedEstimate m = parity_expectation(hist, mask);
      masks.push_back(mask);
      e.operators.push_back({obs.op.to_text(), obs.op, m.value, m.variance});
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(masks.size()),
                                                static_cast<Eigen::Index>(masks.size()));
    if (s.shots > 0) {
      for (size_t i = 0; i < masks.size(); ++i) {
        for (size_t j = 0; j < masks.size(); ++j) {
          cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              i == j ? e.operators[first + i].variance : reflection_covariance(hist, masks[i], masks[j]);
        }
      }
    }
    blocks.emplace_back(first, masks.size());
    covs.push_back(std::move(cov));
  }
  const auto total = static_cast<Eigen::Index>(e.operators.size());
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(total, total);
  for (size_t b = 0; b < blocks.size(); ++b) {
    const auto off = static_cast<Eigen::Index>(blocks[b].first);
    const auto len = static_cast<Eigen::Index>(blocks[b].second);
    sigma.block(off, off, len, len) = covs[b];
  }
  e.keep_fraction = keep_count > 0 ? keep_sum / keep_count : 1.0;
  e.circuits = static_cast<int>(groups.size());
  e.shots = static_cast<double>(s.shots) * e.circuits;
  finish(e, h, sigma, s.clip);
  return e;
}

EnergyEstimate estimate_ev(const PauliSum& h, std::span<const double> theta, const NoiseModel& noise,
                           const EstimationSettings& s, int layers) {
  const int n = num_qubits_of(h);
  EnergyEstimate e;
  e.method = Method::kEV;
  std::vector<EvOperator> ops;
  for (const PauliSum& op : xxyy_izzi_operators(h)) ops.push_back(EvOperator::from_pauli(op));
  const auto readouts = ev_readout_probabilities(n, layers, theta, ops, s.alphas, noise, s.sim);
  double f_sum = 0, h_sum = 0;
  for (size_t oi = 0; oi < readouts.size(); ++oi) {
    std::vector<EvReadout> rd = readouts[oi].readouts;
    Rng rng = make_stream(s.sim.seed, stable_hash("ev:shots:" + ops[oi].name()));
    if (s.shots > 0) {
      for (EvReadout& r : rd) {
        const double total = r.m_plus + r.m_minus + r.m_zero;
        const double pp = std::clamp(r.m_plus / total, 0.0, 1.0);
        std::binomial_distribution<uint64_t> bp(s.shots, pp);
        const uint64_t np = bp(rng);
        const double rest = 1 - pp;
        const double pm = rest > 0 ? std::clamp(r.m_minus / total / rest, 0.0, 1.0) : 0.0;
        std::binomial_distribution<uint64_t> bm(s.shots - np, pm);
        const uint64_t nm = bm(rng);
        r.m_plus = static_cast<double>(np);
        r.m_minus = static_cast<double>(nm);
        r.m_zero = static_cast<double>(s.shots - np - nm);
      }
    }
    const MitigatedEstimate m = ev_estimate(rd, readouts[oi].reference_sign, readouts[oi].field_multiplier,
                                            s.shots > 0 ? &rng : nullptr, s.ev_resamples);
    const PauliSum op = ops[oi].pauli(n);
    e.operators.push_back({ops[oi].name(), op, m.value, m.variance});
    f_sum += m.fidelity;
    h_sum += m.field;
  }
  const auto total = static_cast<Eigen::Index>(e.operators.size());
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(total, total);
  for (Eigen::Index i = 0; i < total; ++i) sigma(i, i) = e.operators[static_cast<size_t>(i)].variance;
  if (!ops.empty()) {
    e.fidelity = f_sum / static_cast<double>(ops.size());
    e.field = h_sum / static_cast<double>(ops.size());
  }
  e.circuits = static_cast<int>(ops.size() * s.alphas.size() * 4);
  e.shots = static_cast<double>(s.shots) * e.circuits;
  finish(e, h, sigma, s.clip);
  return e;
}

EnergyEstimate estimate_vd(const PauliSum& h, std::span<const double> theta, bool postselected,
                           const NoiseModel& noise, const EstimationSettings& s, int layers) {
  const int n = num_qubits_of(h);
  EnergyEstimate e;
  e.method = postselected ? Method::kPSVD : Method::kVD;
  const auto groups = vd_groups(h, layers);
  double purity_sum = 0, keep_sum = 0;
  std::vector<double> variances;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const VdCircuit vd = build_vd_circuit(n, layers, theta, groups[gi], s.mode);
    const uint64_t id = stable_hash("vd:" + std::to_string(gi));
    const Histogram hist = to_histogram(vd_distribution(vd, noise, s.sim, id), 2 * n, noise, s.shots, s.sim.seed, id);
    const VdResult r = vd_estimate(hist, vd, postselected);
    for (size_t k = 0; k < vd.observables.size(); ++k) {
      const PauliSum& op = vd.observables[k].op;
      e.operators.push_back({op.to_text(), op, r.values[k], r.variances[k]});
    }
    purity_sum += r.purity;
    keep_sum += r.keep_fraction;
  }
  const auto total = static_cast<Eigen::Index>(e.operators.size());
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(total, total);
  for (Eigen::Index i = 0; i < total; ++i) sigma(i, i) = e.operators[static_cast<size_t>(i)].variance;
  if (!groups.empty()) {
    e.fidelity = purity_sum / static_cast<double>(groups.size());
    e.keep_fraction = keep_sum / static_cast<double>(groups.size());
  }
  e.circuits = static_cast<int>(groups.size());
  e.shots = static_cast<double>(s.shots) * e.circuits;
  finish(e, h, sigma, s.clip);
  return e;
}

}  // namespace

EnergyEstimate estimate_energy(const PauliSum& h, std::span<const double> theta, Method method,
                               const NoiseModel& noise, const EstimationSettings& settings) {
  noise.validate();
  const int n = num_qubits_of(h);
  const int layers = settings.layers < 0 ? default_layers(n) : settings.layers;
  if (static_cast<int>(theta.size()) != num_parameters(n, layers)) {
    throw EstimationError("expected " + std::to_string(num_parameters(n, layers)) + " parameters, got " +
                          std::to_string(theta.size()));
  }
  switch (method) {
    case Method::kRaw:
      return estimate_grouped(h, theta, false, noise, settings, layers);
    case Method::kPS:
      return estimate_grouped(h, theta, true, noise, settings, layers);
    case Method::kEV:
      return estimate_ev(h, theta, noise, settings, layers);
    case Method::kVD:
      return estimate_vd(h, theta, false, noise, settings, layers);
    case Method::kPSVD:
      return estimate_vd(h, theta, true, noise, settings, layers);
  }
  throw EstimationError("unknown method");
}

DeltaEstimate estimate_delta(const EnergyEstimate& e) {
  std::vector<double> occ, var;
  for (size_t q = 0; q < e.z.size(); ++q) {
    if (std::isnan(e.z[q])) throw EstimationError("missing <Z> for qubit " + std::to_string(q));
    occ.push_back((1 - e.z[q]) / 2);
    var.push_back(std::isnan(e.z_var[q]) ? 0.0 : e.z_var[q] / 4);
  }
  return propagate_delta_variance(occ, var);
}

std::vector<double> group_standard_deviations(const PauliSum& h, std::span<const double> theta,
                                              const NoiseModel& noise, const EstimationSettings& settings) {
  noise.validate();
  const int n = num_qubits_of(h);
  const int layers = settings.layers < 0 ? default_layers(n) : settings.layers;
  const auto groups = group_terms(h, settings.scheme, layers);
  std::vector<Histogram> hists;
  std::vector<std::vector<uint64_t>> masks;
  std::vector<PauliSum> measured;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const MeasuredCircuit mc = build_measurement_circuit(n, layers, theta, groups[gi], settings.mode);
    const uint64_t id = stable_hash("group:" + std::to_string(gi));
    hists.push_back(
        to_histogram(output_distribution(mc.circuit, mc.initial_bits, noise, settings.sim, id), n, noise, 0, 0, id));
    masks.emplace_back();
    for (const auto& obs : groups[gi].observables) {
      masks.back().push_back(mc.physical_mask(obs.logical_zmask));
      measured.push_back(obs.op);
    }
  }
  const LinearCombination lc = decompose_target(h, measured);
  if (lc.residual > 1e-8) throw EstimationError("measured operators do not span the Hamiltonian");
  std::vector<double> out;
  Eigen::Index k = 0;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& m = masks[gi];
    double var = 0;
    for (size_t i = 0; i < m.size(); ++i) {
      const double ei = parity_expectation(hists[gi], m[i]).value;
      for (size_t j = 0; j < m.size(); ++j) {
        const double ej = parity_expectation(hists[gi], m[j]).value;
        const double eij = parity_expectation(hists[gi], m[i] ^ m[j]).value;
        var += lc.coefficients(k + static_cast<Eigen::Index>(i)) * lc.coefficients(k + static_cast<Eigen::Index>(j)) *
               (eij - ei * ej);
      }
    }
    k += static_cast<Eigen::Index>(m.size());
    out.push_back(std::sqrt(std::max(0.0, var)));
  }
  return out;
}

StateVector ansatz_state(int num_qubits, int layers, std::span<const double> theta) {
  StateVector psi(num_qubits, hartree_fock_bits(num_qubits));
  psi.apply(build_upccd(num_qubits, layers, theta));
  return psi;
}

double exact_energy(const PauliSum& h, int layers, std::span<const double> theta) {
  const int n = num_qubits_of(h);
  const int l = layers < 0 ? default_layers(n) : layers;
  const StateVector psi = ansatz_state(n, l, theta);
  const std::vector<int> pos = ansatz_output_positions(n, l);
  return expectation(h.permuted(pos), psi.amplitudes());
}

std::vector<double> vd_distribution(const VdCircuit& vd, const NoiseModel& noise, const SimulationOptions& sim,
                                    uint64_t circuit_id) {
  noise.validate();
  const int n = vd.num_qubits;
  NoiseModel inner = noise;
  inner.global_survival = 1;
  const SimulationMode mode = resolve_mode(2 * n, noise, sim);
  std::vector<double> probs;
  if (mode == SimulationMode::kDensity) {
    DensityMatrix reg(n, vd.register_bits, sim.limits);
    apply_circuit(reg, vd.register_circuit, inner);
    DensityMatrix joint = reg.tensor(reg, sim.limits);
    apply_circuit(joint, vd.tail, inner);
    probs = joint.probabilities();
  } else {
    const size_t traj = noise.is_unitary() ? 1 : static_cast<size_t>(std::max(1, sim.trajectories));
    const size_t dim = size_t{1} << (2 * n);
    std::vector<std::vector<double>> partial(num_blocks(traj));
    parallel_blocks(traj, sim.workers, [&](size_t b, size_t lo, size_t hi) {
      std::vector<double> acc(dim, 0.0);
      for (size_t t = lo; t < hi; ++t) {
        StateVector a(n, vd.register_bits, sim.limits), c(n, vd.register_bits, sim.limits);
        Rng ra = make_stream(sim.seed, circuit_id, 3 * t);
        Rng rc = make_stream(sim.seed, circuit_id, 3 * t + 1);
        Rng rt = make_stream(sim.seed, circuit_id, 3 * t + 2);
        apply_circuit(a, vd.register_circuit, inner, ra);
        apply_circuit(c, vd.register_circuit, inner, rc);
        StateVector joint = a.tensor(c, sim.limits);
        apply_circuit(joint, vd.tail, inner, rt);
        const auto p = joint.probabilities();
        for (size_t i = 0; i < dim; ++i) acc[i] += p[i];
      }
      partial[b] = std::move(acc);
    });
    probs.assign(dim, 0.0);
    for (const auto& p : partial) {
      if (p.empty()) continue;
      for (size_t i = 0; i < dim; ++i) probs[i] += p[i];
    }
    for (double& p : probs) p /= static_cast<double>(traj);
  }
  const double f = noise.global_survival;
  if (f < 1) {
    const double u = (1 - f) / static_cast<double>(probs.size());
    for (double& p : probs) p = f * p + u;
  }
  return probs;
}

}  // namespace pairvqe
