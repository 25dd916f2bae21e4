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
#include <cmath>

namespace pairvqe {

namespace {

constexpr TomographyBasis kBases[] = {TomographyBasis::kPlusX, TomographyBasis::kMinusX, TomographyBasis::kPlusY,
                                      TomographyBasis::kMinusY};

std::string setting_key(const EvOperator& op, size_t alpha_index, int basis) {
  return "ev:" + op.name() + ":" + std::to_string(alpha_index) + ":" + std::to_string(basis);
}

std::vector<EvOperatorReadouts> generic_readouts(int n, int layers, std::span<const double> theta,
                                                 std::span<const EvOperator> ops, std::span<const double> alphas,
                                                 const NoiseModel& noise, const SimulationOptions& sim) {
  std::vector<EvOperatorReadouts> out;
  for (const EvOperator& op : ops) {
    EvOperatorReadouts r;
    r.op = op;
    for (size_t ai = 0; ai < alphas.size(); ++ai) {
      for (int bi = 0; bi < 4; ++bi) {
        const EvCircuit ev = build_ev_circuit(n, layers, theta, op, alphas[ai], kBases[bi]);
        r.reference_sign = ev.reference_sign;
        r.field_multiplier = ev_field_multiplier(ev);
        std::vector<double> dist =
            output_distribution(ev.circuit, 0, noise, sim, stable_hash(setting_key(op, ai, bi)));
        apply_readout(dist, n, noise.readout_p01, noise.readout_p10);
        EvReadout rd;
        rd.alpha = alphas[ai];
        rd.basis = kBases[bi];
        rd.m_plus = dist[0];
        rd.m_minus = dist[1];
        rd.m_zero = std::max(0.0, 1 - dist[0] - dist[1]);
        r.readouts.push_back(rd);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<EvOperatorReadouts> ev_readout_probabilities(int num_qubits, int layers, std::span<const double> theta,
                                                         std::span<const EvOperator> ops,
                                                         std::span<const double> alphas, const NoiseModel& noise,
                                                         const SimulationOptions& sim, bool force_generic) {
  noise.validate();
  const int n = num_qubits;
  const SimulationMode mode = resolve_mode(n, noise, sim);
  if (force_generic || mode == SimulationMode::kDensity || !noise.pauli_only() || ops.empty()) {
    return generic_readouts(n, layers, theta, ops, alphas, noise, sim);
  }

  NoiseModel inner = noise;
  inner.global_survival = 1;
  std::vector<EvCircuit> evs;
  for (const EvOperator& op : ops) evs.push_back(build_ev_circuit(n, layers, theta, op, 0.0, TomographyBasis::kPlusX));
  const size_t head_end = evs[0].head_end;
  const auto& prefix = evs[0].circuit.layers();

  // Readout weight of every configuration of the qubits other than the measurement qubit.
  const size_t half = size_t{1} << (n - 1);
  std::vector<double> weight(half);
  for (size_t r = 0; r < half; ++r) {
    double w = 1;
    for (int q = 0; q < n - 1; ++q) w *= ((r >> q) & 1) ? noise.readout_p10 : (1 - noise.readout_p01);
    weight[r] = w;
  }

  const size_t traj = noise.is_unitary() ? 1 : static_cast<size_t>(std::max(1, sim.trajectories));
  std::vector<std::vector<Eigen::Matrix4cd>> partial(num_blocks(traj));
  parallel_blocks(traj, sim.workers, [&](size_t b, size_t lo, size_t hi) {
    std::vector<Eigen::Matrix4cd> acc(ops.size(), Eigen::Matrix4cd::Zero());
    for (size_t t = lo; t < hi; ++t) {
      StateVector psi(n, 0, sim.limits);
      Rng rng = make_stream(sim.seed, stable_hash("ev:prefix"), t);
      StateVector* one[1] = {&psi};
      for (size_t l = 0; l < head_end; ++l) apply_noisy_layer(one, prefix[l], inner, rng);
      for (size_t oi = 0; oi < ops.size(); ++oi) {
        const EvCircuit& ev = evs[oi];
        const auto& layers_ = ev.circuit.layers();
        Rng orng = make_stream(sim.seed, stable_hash("ev:suffix:" + ops[oi].name()), t);
        StateVector chi = psi;
        StateVector* c1[1] = {&chi};
        for (size_t l = head_end; l < ev.op_layer; ++l) apply_noisy_layer(c1, layers_[l], inner, orng);
        StateVector w = chi;
        w.apply_pauli(0, ev.op_pauli.z_mask());
        StateVector* pair[2] = {&chi, &w};
        for (size_t l = ev.op_layer; l + 1 < layers_.size(); ++l) apply_noisy_layer(pair, layers_[l], inner, orng);
        const auto u = chi.amplitudes(), v = w.amplitudes();
        Eigen::Matrix4cd& m = acc[oi];
        for (size_t r = 0; r < half; ++r) {
          if (weight[r] == 0) continue;
          const Eigen::Vector4cd x(u[2 * r], u[2 * r + 1], v[2 * r], v[2 * r + 1]);
          m.noalias() += weight[r] * (x * x.adjoint());
        }
      }
    }
    partial[b] = std::move(acc);
  });
  std::vector<Eigen::Matrix4cd> mbar(ops.size(), Eigen::Matrix4cd::Zero());
  for (const auto& p : partial) {
    for (size_t oi = 0; oi < ops.size(); ++oi) mbar[oi] += p[oi];
  }
  for (auto& m : mbar) m /= static_cast<double>(traj);

  const double eps = noise.p1 / 2;  // bit flip from depolarizing after the basis change
  const double p01 = noise.readout_p01, p10 = noise.readout_p10, f = noise.global_survival;
  double rest_zero = 1;
  for (int q = 1; q < n; ++q) rest_zero *= ((1 - p01) + p10) / 2;
  const double uniform_plus = rest_zero * ((1 - p01) + p10) / 2;
  const double uniform_minus = rest_zero * (p01 + (1 - p10)) / 2;

  std::vector<EvOperatorReadouts> out;
  for (size_t oi = 0; oi < ops.size(); ++oi) {
    EvOperatorReadouts r;
    r.op = ops[oi];
    r.reference_sign = evs[oi].reference_sign;
    r.field_multiplier = ev_field_multiplier(evs[oi]);
    for (double alpha : alphas) {
      const double c = std::cos(alpha), s = std::sin(alpha);
      for (int bi = 0; bi < 4; ++bi) {
        const Eigen::Matrix2cd rot = single_qubit_matrix(tomography_rotation(0, kBases[bi]));
        double p[2];
        for (int k = 0; k < 2; ++k) {
          const Eigen::Vector4cd vk(c * rot(k, 0), c * rot(k, 1), cplx(0, s) * rot(k, 0), cplx(0, s) * rot(k, 1));
          p[k] = (vk.transpose() * mbar[oi] * vk.conjugate()).value().real();
        }
        const double q0 = (1 - eps) * p[0] + eps * p[1], q1 = eps * p[0] + (1 - eps) * p[1];
        EvReadout rd;
        rd.alpha = alpha;
        rd.basis = kBases[bi];
        rd.m_plus = f * ((1 - p01) * q0 + p10 * q1) + (1 - f) * uniform_plus;
        rd.m_minus = f * (p01 * q0 + (1 - p10) * q1) + (1 - f) * uniform_minus;
        rd.m_zero = std::max(0.0, 1 - rd.m_plus - rd.m_minus);
        r.readouts.push_back(rd);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

double loschmidt_probability(int num_qubits, int layers, std::span<const double> theta, const NoiseModel& noise,
                             const SimulationOptions& sim) {
  const EvOperator identity{EvOperator::Kind::kIdentity, -1, -1};
  const EvCircuit ev = build_ev_circuit(num_qubits, layers, theta, identity, 0.0, TomographyBasis::kPlusX);
  std::vector<double> dist = output_distribution(ev.circuit, 0, noise, sim, stable_hash("loschmidt"));
  apply_readout(dist, num_qubits, noise.readout_p01, noise.readout_p10);
  return dist[0];
}

}  // namespace pairvqe
