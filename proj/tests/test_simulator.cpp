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

#include <numbers>
#include <random>

#include "oracle.hpp"
#include "pairvqe/simulator.hpp"

namespace pairvqe {
namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXcd to_matrix(const DensityMatrix& rho) {
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = rho.at(static_cast<size_t>(r), static_cast<size_t>(c));
  }
  return m;
}

Eigen::VectorXcd to_vector(const StateVector& psi) {
  const auto a = psi.amplitudes();
  return Eigen::Map<const Eigen::VectorXcd>(a.data(), static_cast<Eigen::Index>(a.size()));
}

Circuit random_circuit(int n, int depth, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2, 2);
  Circuit c(n);
  for (int l = 0; l < depth; ++l) {
    Layer layer;
    const int off = l % 2;
    for (int q = off; q + 1 < n; q += 2) layer.push_back(Gate::gs(q, q + 1, u(rng)));
    if (off == 1) layer.push_back(Gate::phased_xz(0, u(rng), u(rng), u(rng)));
    c.append(std::move(layer));
  }
  return c;
}

DensityMatrix random_density(int n, std::mt19937_64& rng) {
  DensityMatrix rho(n, 0);
  const Circuit c = random_circuit(n, 4, rng);
  for (const Layer& l : c.layers()) {
    rho.apply(l);
    for (int q = 0; q < n; ++q) rho.amplitude_damp(q, 0.2);
  }
  return rho;
}

TEST(StateVector, MatchesDenseUnitary) {
  std::mt19937_64 rng(1);
  const Circuit c = random_circuit(4, 6, rng);
  StateVector psi(4, 0b0101);
  psi.apply(c);
  const Eigen::VectorXcd want = circuit_unitary(c).col(0b0101);
  EXPECT_LT((to_vector(psi) - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StateVector, PauliAndField) {
  StateVector psi(2, 0);
  psi.apply(Gate::phased_xz(0, std::numbers::pi / 4, std::numbers::pi / 4, 0));
  const Eigen::VectorXcd before = to_vector(psi);
  psi.apply_pauli(0b11, 0b01);
  const Eigen::VectorXcd want = oracle::label_matrix("XX") * oracle::label_matrix("ZI") * before;
  EXPECT_LT((to_vector(psi) - want).cwiseAbs().maxCoeff(), 1e-12);
  StateVector f(2, 0b10);
  f.apply_field(0.3);
  // exp(i h (Z0 + Z1)) on |q0=0, q1=1> carries phase exp(i h (1 - 1)) = 1.
  EXPECT_NEAR(std::abs(f.amplitudes()[0b10] - cplx(1)), 0.0, 1e-15);
  StateVector g(2, 0);
  g.apply_field(0.3);
  EXPECT_NEAR(std::arg(g.amplitudes()[0]), 0.6, 1e-15);
}

TEST(StateVector, TensorPutsOtherOnHighQubits) {
  const StateVector a(2, 0b01), b(1, 0b1);
  const StateVector t = a.tensor(b);
  EXPECT_EQ(t.num_qubits(), 3);
  EXPECT_NEAR(std::abs(t.amplitudes()[0b101]), 1.0, 1e-15);
}

TEST(StateVector, RejectsGateOutsideRegister) {
  StateVector psi(2, 0);
  EXPECT_THROW(psi.apply(Gate::gs(1, 2, 0.1)), SimulatorError);
  DensityMatrix rho(2, 0);
  EXPECT_THROW(rho.apply(Gate::virtual_z(3, 0.1)), SimulatorError);
}

TEST(StateVector, MemoryBound) {
  SimulatorLimits small;
  small.max_pure_amplitudes = 16;
  EXPECT_THROW(StateVector(5, 0, small), SimulatorError);
}

TEST(DensityMatrix, UnitaryEvolution) {
  std::mt19937_64 rng(2);
  const Circuit c = random_circuit(3, 5, rng);
  DensityMatrix rho(3, 0b011);
  for (const Layer& l : c.layers()) rho.apply(l);
  const Eigen::VectorXcd v = circuit_unitary(c).col(0b011);
  EXPECT_LT((to_matrix(rho) - v * v.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
}

TEST(DensityMatrix, DepolarizingMatchesPauliTwirl) {
  std::mt19937_64 rng(3);
  const DensityMatrix base = random_density(3, rng);
  const Eigen::MatrixXcd m = to_matrix(base);
  for (auto [q0, q1] : {std::pair{0, 2}, std::pair{1, -1}}) {
    const double p = 0.3;
    DensityMatrix rho = base;
    rho.depolarize(q0, q1, p);
    Eigen::MatrixXcd twirl = Eigen::MatrixXcd::Zero(8, 8);
    const std::string ops = "IXYZ";
    const int count = q1 < 0 ? 4 : 16;
    for (int k = 0; k < count; ++k) {
      std::string label = "III";
      label[static_cast<size_t>(q0)] = ops[static_cast<size_t>(k % 4)];
      if (q1 >= 0) label[static_cast<size_t>(q1)] = ops[static_cast<size_t>(k / 4)];
      const Eigen::MatrixXcd pm = oracle::label_matrix(label);
      twirl += pm * m * pm.adjoint() / count;
    }
    EXPECT_LT((to_matrix(rho) - ((1 - p) * m + p * twirl)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DensityMatrix, AmplitudeDampingMatchesKraus) {
  std::mt19937_64 rng(4);
  const DensityMatrix base = random_density(2, rng);
  const double g = 0.27;
  DensityMatrix rho = base;
  rho.amplitude_damp(1, g);
  Eigen::Matrix2cd k0, k1;
  k0 << 1, 0, 0, std::sqrt(1 - g);
  k1 << 0, std::sqrt(g), 0, 0;
  const Eigen::MatrixXcd e0 = oracle::embed(k0, 1, -1, 2), e1 = oracle::embed(k1, 1, -1, 2);
  const Eigen::MatrixXcd m = to_matrix(base);
  EXPECT_LT((to_matrix(rho) - (e0 * m * e0.adjoint() + e1 * m * e1.adjoint())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DensityMatrix, DephasingScalesCoherences) {
  std::mt19937_64 rng(5);
  const DensityMatrix base = random_density(2, rng);
  const double lambda = 0.36;
  DensityMatrix rho = base;
  rho.dephase(0, lambda);
  // Phase flip with probability (1 - sqrt(1 - lambda)) / 2.
  const double pz = dephasing_flip_probability(lambda);
  const Eigen::MatrixXcd z = oracle::label_matrix("ZI"), m = to_matrix(base);
  EXPECT_LT((to_matrix(rho) - ((1 - pz) * m + pz * z * m * z)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(std::abs(rho.at(0b00, 0b01)), std::sqrt(1 - lambda) * std::abs(base.at(0b00, 0b01)), 1e-12);
}

TEST(DensityMatrix, GlobalDepolarizingAndField) {
  std::mt19937_64 rng(6);
  const DensityMatrix base = random_density(2, rng);
  DensityMatrix rho = base;
  rho.global_depolarize(0.3);
  const Eigen::MatrixXcd want = 0.3 * to_matrix(base) + 0.7 * Eigen::MatrixXcd::Identity(4, 4) / 4.0;
  EXPECT_LT((to_matrix(rho) - want).cwiseAbs().maxCoeff(), 1e-12);
  DensityMatrix f = base;
  f.apply_field(0.2);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    const int zsum = (i & 1 ? -1 : 1) + (i & 2 ? -1 : 1);
    u(i, i) = std::exp(cplx(0, 0.2 * zsum));
  }
  EXPECT_LT((to_matrix(f) - u * to_matrix(base) * u.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NoiseModel, Validation) {
  NoiseModel n;
  n.p2 = 1.5;
  EXPECT_THROW(n.validate(), SimulatorError);
  NoiseModel m;
  m.readout_p01 = -0.1;
  EXPECT_THROW(m.validate(), SimulatorError);
  NoiseModel ok;
  ok.field = 0.1;
  EXPECT_TRUE(ok.is_unitary());
  EXPECT_FALSE(ok.is_noiseless());
}

class TrajectoriesMatchDensity : public ::testing::TestWithParam<NoiseModel> {};

TEST_P(TrajectoriesMatchDensity, OutputDistributions) {
  std::mt19937_64 rng(7);
  const Circuit c = random_circuit(4, 6, rng);
  const NoiseModel noise = GetParam();
  SimulationOptions dens, traj;
  dens.mode = SimulationMode::kDensity;
  traj.mode = SimulationMode::kPure;
  traj.trajectories = 4000;
  traj.seed = 3;
  const auto pd = output_distribution(c, 0b0101, noise, dens, 1);
  const auto pt = output_distribution(c, 0b0101, noise, traj, 1);
  double tv = 0;
  for (size_t i = 0; i < pd.size(); ++i) tv += std::abs(pd[i] - pt[i]) / 2;
  EXPECT_LT(tv, 0.03);
}

NoiseModel make_noise(double p2, double p1, double damp, double deph, double field, double f) {
  NoiseModel n;
  n.p2 = p2;
  n.p1 = p1;
  n.amplitude_damping = damp;
  n.dephasing = deph;
  n.field = field;
  n.global_survival = f;
  return n;
}

INSTANTIATE_TEST_SUITE_P(Channels, TrajectoriesMatchDensity,
                         ::testing::Values(make_noise(0.05, 0.01, 0, 0, 0, 1), make_noise(0, 0, 0.05, 0, 0, 1),
                                           make_noise(0, 0, 0, 0.1, 0.05, 1), make_noise(0.02, 0, 0.02, 0.02, 0, 0.6)));

TEST(OutputDistribution, UnitaryPureMatchesDensityExactly) {
  std::mt19937_64 rng(8);
  const Circuit c = random_circuit(3, 5, rng);
  NoiseModel noise;
  noise.field = 0.07;
  noise.global_survival = 0.4;
  SimulationOptions dens, pure;
  dens.mode = SimulationMode::kDensity;
  pure.mode = SimulationMode::kPure;
  const auto a = output_distribution(c, 0, noise, dens, 1), b = output_distribution(c, 0, noise, pure, 1);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(OutputDistribution, DeterministicAcrossWorkers) {
  std::mt19937_64 rng(9);
  const Circuit c = random_circuit(4, 4, rng);
  const NoiseModel noise = make_noise(0.05, 0.01, 0.01, 0.01, 0, 1);
  SimulationOptions a, b;
  a.mode = b.mode = SimulationMode::kPure;
  a.trajectories = b.trajectories = 300;
  b.workers = 4;
  EXPECT_EQ(output_distribution(c, 0, noise, a, 5), output_distribution(c, 0, noise, b, 5));
}

TEST(Readout, MatchesPerBitFlipMatrices) {
  std::vector<double> p = {0.1, 0.2, 0.3, 0.4};
  const double p01 = 0.05, p10 = 0.12;
  Eigen::Matrix2d f;
  f << 1 - p01, p10, p01, 1 - p10;  // column = true bit, row = read bit
  Eigen::Matrix4d full;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) full(r, c) = f(r & 1, c & 1) * f((r >> 1) & 1, (c >> 1) & 1);
  }
  const Eigen::Vector4d want = full * Eigen::Vector4d(p[0], p[1], p[2], p[3]);
  apply_readout(p, 2, p01, p10);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(p[static_cast<size_t>(i)], want(i), 1e-15);
}

TEST(Sampling, CountsAreMultinomial) {
  const std::vector<double> p = {0.5, 0.25, 0.125, 0.125};
  Rng rng = make_stream(1, 2);
  const MeasurementRecord r = sample_distribution(p, 2, 200000, rng);
  EXPECT_EQ(r.total(), 200000u);
  for (uint64_t b = 0; b < 4; ++b) {
    const double freq = static_cast<double>(r.counts.count(b) ? r.counts.at(b) : 0) / 200000.0;
    EXPECT_NEAR(freq, p[b], 5 * std::sqrt(p[b] * (1 - p[b]) / 200000.0));
  }
  Rng again = make_stream(1, 2);
  EXPECT_EQ(sample_distribution(p, 2, 200000, again).counts, r.counts);
}

TEST(Sampling, StateSamplingAppliesReadout) {
  const StateVector psi(1, 0);
  const MeasurementRecord r = sample(psi, 100000, 0.1, 0.0, 4);
  const double ones = static_cast<double>(r.counts.count(1) ? r.counts.at(1) : 0) / 100000.0;
  EXPECT_NEAR(ones, 0.1, 0.005);
}

TEST(MeasurementRecord, TextRoundTrip) {
  MeasurementRecord r;
  r.circuit_id = "group:0";
  r.width = 4;
  r.counts = {{0b0101, 70}, {0b1010, 30}};
  r.metadata = {{"seed", "12"}};
  const MeasurementRecord back = MeasurementRecord::from_text(r.to_text());
  EXPECT_EQ(back.circuit_id, r.circuit_id);
  EXPECT_EQ(back.width, 4);
  EXPECT_EQ(back.counts, r.counts);
  EXPECT_EQ(back.metadata.at("seed"), "12");
  EXPECT_EQ(bitstring(0b0011, 4), "1100");
  EXPECT_EQ(parse_bitstring("1100"), 0b0011u);
}

TEST(Modes, ParseAndResolve) {
  EXPECT_EQ(parse_simulation_mode("density"), SimulationMode::kDensity);
  EXPECT_THROW(parse_simulation_mode("tensor"), SimulatorError);
  SimulationOptions o;
  EXPECT_EQ(resolve_mode(6, NoiseModel{}, o), SimulationMode::kPure);
  EXPECT_EQ(resolve_mode(6, make_noise(0.01, 0, 0, 0, 0, 1), o), SimulationMode::kDensity);
  EXPECT_EQ(resolve_mode(12, make_noise(0.01, 0, 0, 0, 0, 1), o), SimulationMode::kPure);
}

}  // namespace
}  // namespace pairvqe
