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
#include <gtest/gtest.h>

#include <bit>
#include <numbers>
#include <random>
#include <set>

#include "oracle.hpp"
#include "pairvqe/circuits.hpp"

namespace pairvqe {
namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0, 1);

Eigen::Matrix2cd exp_i(double angle, char axis) {
  return std::cos(angle) * Eigen::Matrix2cd::Identity() + kI * std::sin(angle) * oracle::pauli(axis);
}

TEST(Gates, PhasedXzMatchesExponentials) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int t = 0; t < 20; ++t) {
    const double ax = u(rng), aa = u(rng), az = u(rng);
    const Eigen::Matrix2cd want = exp_i(az + aa, 'Z') * exp_i(ax, 'X') * exp_i(-aa, 'Z');
    EXPECT_LT((single_qubit_matrix(Gate::phased_xz(0, ax, aa, az)) - want).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_LT((single_qubit_matrix(Gate::virtual_z(0, 0.3)) - exp_i(0.3, 'Z')).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gates, TwoQubitMatricesMatchDefinitions) {
  const Eigen::MatrixXcd zz = oracle::kron(oracle::pauli('Z'), oracle::pauli('Z'));
  const Eigen::MatrixXcd want_zz =
      std::cos(0.4) * Eigen::Matrix4cd::Identity() + kI * std::sin(0.4) * zz;
  EXPECT_LT((two_qubit_matrix(Gate::zz_phase(0, 1, 0.4)) - want_zz).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::Matrix4cd swap = Eigen::Matrix4cd::Zero();
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1;
  const Eigen::Matrix4cd rs = two_qubit_matrix(Gate::sqrt_swap(0, 1));
  EXPECT_LT((rs * rs - swap).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::Matrix4cd iswap = Eigen::Matrix4cd::Zero();
  iswap(0, 0) = iswap(3, 3) = 1;
  iswap(1, 2) = iswap(2, 1) = kI;
  const Eigen::Matrix4cd ri = two_qubit_matrix(Gate::sqrt_iswap(0, 1));
  EXPECT_LT((ri * ri - iswap).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::Matrix4cd cz = Eigen::Matrix4cd::Identity();
  cz(3, 3) = -1;
  EXPECT_LT((two_qubit_matrix(Gate::cz(0, 1)) - cz).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::Matrix4cd cnot = Eigen::Matrix4cd::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
  EXPECT_LT((two_qubit_matrix(Gate::cnot(0, 1)) - cnot).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gates, GsIsSwapTimesGivens) {
  for (double theta : {0.0, 0.3, kPi / 4, -1.1}) {
    const Eigen::Matrix4cd m = two_qubit_matrix(Gate::gs(0, 1, theta));
    EXPECT_LT((m * m - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff(), 1e-12) << "GS is an involution";
    EXPECT_NEAR(m(1, 1).real(), std::sin(theta), 1e-15);
    EXPECT_NEAR(m(2, 1).real(), std::cos(theta), 1e-15);
  }
}

TEST(Gates, InversesUndoEveryKind) {
  const std::vector<Gate> gates = {Gate::gs(0, 1, 0.7),        Gate::cz(0, 1),
                                   Gate::swap(0, 1),           Gate::phased_xz(0, 0.3, -0.2, 0.9),
                                   Gate::virtual_z(1, 0.4),    Gate::sqrt_swap(0, 1),
                                   Gate::sqrt_iswap(1, 0),     Gate::cnot(1, 0),
                                   Gate::zz_phase(0, 1, -0.6)};
  for (const Gate& g : gates) {
    const Eigen::MatrixXcd u = gate_unitary(g, 2) * gate_unitary(g.inverse(), 2);
    EXPECT_LT((u - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12) << gate_name(g.kind);
  }
}

TEST(Gates, TomographyRotationsMapBasesToZ) {
  const Eigen::Matrix2cd z = oracle::pauli('Z');
  const std::pair<TomographyBasis, Eigen::Matrix2cd> cases[] = {
      {TomographyBasis::kPlusX, oracle::pauli('X')},
      {TomographyBasis::kMinusX, -oracle::pauli('X')},
      {TomographyBasis::kPlusY, oracle::pauli('Y')},
      {TomographyBasis::kMinusY, -oracle::pauli('Y')}};
  for (const auto& [basis, want] : cases) {
    const Eigen::Matrix2cd r = single_qubit_matrix(tomography_rotation(0, basis));
    EXPECT_LT((r.adjoint() * z * r - want).cwiseAbs().maxCoeff(), 1e-12);
  }
  const Eigen::Matrix2cd h = single_qubit_matrix(hadamard_like(0));
  EXPECT_LT((h.adjoint() * oracle::pauli('X') * h - z).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Circuit, AppendValidatesLayers) {
  Circuit c(3);
  EXPECT_THROW(c.append({Gate::gs(0, 1, 0.1), Gate::virtual_z(1, 0.2)}), CircuitError);
  EXPECT_THROW(c.append({Gate::gs(0, 3, 0.1)}), CircuitError);
  EXPECT_THROW(c.append({Gate::gs(1, 1, 0.1)}), CircuitError);
  c.append({Gate::gs(0, 1, 0.1), Gate::virtual_z(2, 0.2)});
  EXPECT_EQ(c.depth(), 1u);
  EXPECT_EQ(c.gate_count(), 2u);
  EXPECT_EQ(c.two_qubit_gate_count(), 1u);
}

TEST(Circuit, UnitaryMatchesProductOfEmbeddedGates) {
  Circuit c(3);
  c.append({Gate::gs(2, 0, 0.3), Gate::phased_xz(1, 0.2, 0.1, -0.4)});
  c.append({Gate::sqrt_iswap(1, 2)});
  c.append({Gate::cnot(0, 1), Gate::virtual_z(2, 0.5)});
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Identity(8, 8);
  for (const Layer& l : c.layers()) {
    for (const Gate& g : l) {
      const Eigen::MatrixXcd m = g.is_two_qubit() ? Eigen::MatrixXcd(two_qubit_matrix(g))
                                                  : Eigen::MatrixXcd(single_qubit_matrix(g));
      want = oracle::embed(m, g.q0, g.q1, 3) * want;
    }
  }
  EXPECT_LT((circuit_unitary(c) - want).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((circuit_unitary(c.inverse()) * want - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Circuit, DumpParseRoundTrip) {
  Circuit c(4);
  c.append({Gate::gs(0, 1, 0.1234567890123), Gate::zz_phase(2, 3, -0.5)});
  c.append({Gate::phased_xz(3, 0.25, -1.5, 2.0), Gate::sqrt_swap(0, 2, true)});
  c.append({Gate::virtual_z(1, 1e-9)});
  const Circuit back = Circuit::parse(c.dump(), 4);
  ASSERT_EQ(back.depth(), c.depth());
  for (size_t l = 0; l < c.depth(); ++l) EXPECT_EQ(back.layers()[l], c.layers()[l]);
  EXPECT_THROW(Circuit::parse("FOO(0,1)", 4), CircuitError);
}

TEST(Circuit, RelabeledMovesQubits) {
  Circuit c(2);
  c.append({Gate::cnot(0, 1)});
  const std::vector<int> map = {3, 1};
  const Circuit r = c.relabeled(map, 4);
  EXPECT_EQ(r.layers()[0][0].q0, 3);
  EXPECT_EQ(r.layers()[0][0].q1, 1);
}

TEST(Ansatz, LayerScheduleCoversEveryExcitationOnce) {
  for (int n : {4, 6, 8, 10}) {
    const auto sched = excitation_schedule(n, default_layers(n));
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : sched) {
      if (a > b) std::swap(a, b);
      EXPECT_NE(a % 2, b % 2) << "pair must join an occupied and a virtual qubit";
      EXPECT_TRUE(seen.insert({a, b}).second) << "repeated pair";
    }
    EXPECT_EQ(seen.size(), static_cast<size_t>(n * n / 4));
    EXPECT_EQ(num_parameters(n, default_layers(n)), n * n / 4);
  }
}

TEST(Ansatz, OutputPositionsTrackSwaps) {
  // GS(0) is a SWAP, so a single excitation ends where the position map says.
  for (int n : {4, 6, 8}) {
    for (int shift : {0, 1}) {
      const int layers = default_layers(n);
      const std::vector<double> zeros(static_cast<size_t>(num_parameters(n, layers)), 0.0);
      const Eigen::MatrixXcd u = circuit_unitary(build_upccd(n, layers, zeros, shift));
      const auto pos = ansatz_output_positions(n, layers, shift);
      for (int q = 0; q < n; ++q) {
        const Eigen::Index in = Eigen::Index{1} << ((q + shift) % n);
        Eigen::Index out = 0;
        u.col(in).cwiseAbs().maxCoeff(&out);
        EXPECT_EQ(out, Eigen::Index{1} << pos[static_cast<size_t>(q)]);
      }
    }
  }
}

TEST(Ansatz, RejectsWrongParameterCount) {
  const std::vector<double> theta(3, 0.0);
  EXPECT_THROW(build_upccd(4, 2, theta), CircuitError);
}

TEST(Measurement, SettingsCoverEveryPair) {
  for (int n : {4, 6, 8, 10}) {
    const auto settings = ladder_measurement_settings(n, default_layers(n));
    EXPECT_EQ(settings.size(), static_cast<size_t>(n));
    std::set<std::pair<int, int>> seen;
    for (const auto& s : settings) {
      std::set<int> used;
      for (auto [a, b] : s.pairs) {
        EXPECT_TRUE(used.insert(a).second && used.insert(b).second) << "pairs in a setting must be disjoint";
        seen.insert({std::min(a, b), std::max(a, b)});
        // The rotated pair sits on a rung of the ladder.
        EXPECT_EQ(s.position[static_cast<size_t>(a)] + s.position[static_cast<size_t>(b)], n - 1);
      }
    }
    EXPECT_EQ(seen.size(), static_cast<size_t>(n * (n - 1) / 2));
  }
}

TEST(Measurement, PhysicalMaskFollowsPositions) {
  MeasuredCircuit mc;
  mc.position = {2, 0, 1};
  EXPECT_EQ(mc.physical_mask(0b011), 0b101u);
  EXPECT_EQ(mc.logical_bits(0b101), 0b011u);
}

TEST(EchoCircuit, LoschmidtEchoReturnsToZero) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n : {4, 6}) {
    std::vector<double> theta(static_cast<size_t>(num_parameters(n, default_layers(n))));
    for (double& t : theta) t = u(rng);
    const EvOperator id{EvOperator::Kind::kIdentity, -1, -1};
    const EvCircuit ev = build_ev_circuit(n, default_layers(n), theta, id, 0.0, TomographyBasis::kPlusX);
    const Eigen::MatrixXcd uu = circuit_unitary(ev.circuit);
    EXPECT_NEAR(std::norm(uu(0, 0)), 1.0, 1e-12);
    EXPECT_LE(ev.head_end, ev.op_layer);
    EXPECT_EQ(ev.reference_sign, 1.0);
  }
}

TEST(EchoCircuit, OperatorNamesAndCount) {
  const PauliSum d = d_plus(4, 1, 2);
  const EvOperator op = EvOperator::from_pauli(d);
  EXPECT_EQ(op.kind, EvOperator::Kind::kDPlus);
  EXPECT_EQ(op.name(), "D+1,2");
  EXPECT_EQ(op.pauli(4).to_text(), d.to_text());
  EXPECT_EQ(ev_circuit_count(rg_hamiltonian(4, 0.5)), 12 * 10);
}

TEST(ZzRounds, EveryPairOnceInDisjointRounds) {
  PauliSum h(6);
  for (int a = 0; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) {
      PauliString p(6);
      p.set(a, 'Z');
      p.set(b, 'Z');
      h.add(p, 0.1 * (a + b + 1));
    }
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& round : zz_rounds(h)) {
    std::set<int> used;
    for (auto [a, b] : round) {
      EXPECT_TRUE(used.insert(a).second && used.insert(b).second);
      EXPECT_TRUE(seen.insert({std::min(a, b), std::max(a, b)}).second);
    }
  }
  EXPECT_EQ(seen.size(), 15u);
}

}  // namespace
}  // namespace pairvqe
