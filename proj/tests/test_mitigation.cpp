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

#include "pairvqe/mitigation.hpp"
#include "pairvqe/pipeline.hpp"

namespace pairvqe {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Methods, NamesRoundTrip) {
  for (Method m : {Method::kRaw, Method::kPS, Method::kEV, Method::kVD, Method::kPSVD}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_THROW(parse_method("ZNE"), MitigationError);
}

TEST(Symmetry, NumberAndParity) {
  const Symmetry num = Symmetry::number(4, 2);
  EXPECT_TRUE(num.accepts(0b0101));
  EXPECT_FALSE(num.accepts(0b0111));
  const Symmetry par = Symmetry::parity(0b0011, 0);
  EXPECT_TRUE(par.accepts(0b1111));
  EXPECT_FALSE(par.accepts(0b0001));
  EXPECT_TRUE(Symmetry{}.accepts(0b1));
}

TEST(Postselection, RecordAndHistogram) {
  MeasurementRecord r;
  r.width = 2;
  r.counts = {{0b01, 60}, {0b10, 20}, {0b11, 15}, {0b00, 5}};
  const PostselectResult ps = postselect(r, Symmetry::number(2, 1));
  EXPECT_DOUBLE_EQ(ps.keep_fraction, 0.8);
  EXPECT_EQ(ps.record.total(), 80u);
  EXPECT_FALSE(ps.empty);
  double keep = 0;
  const Histogram h = postselect(Histogram::from_record(r), Symmetry::number(2, 1), &keep);
  EXPECT_DOUBLE_EQ(keep, 0.8);
  EXPECT_DOUBLE_EQ(h.shots, 80.0);
  const PostselectResult none = postselect(r, Symmetry::number(2, 2));
  EXPECT_FALSE(none.empty);
  EXPECT_TRUE(postselect(r, Symmetry::parity(0b11, 1)).keep_fraction > 0);
}

TEST(Parity, ExpectationAndVariance) {
  MeasurementRecord r;
  r.width = 2;
  r.counts = {{0b00, 700}, {0b01, 200}, {0b11, 100}};
  const Histogram h = Histogram::from_record(r);
  const MitigatedEstimate z0 = parity_expectation(h, 0b01);
  EXPECT_DOUBLE_EQ(z0.value, 0.4);
  EXPECT_NEAR(z0.variance, (1 - 0.16) / 1000, 1e-15);
  // Covariance of the two parity means from the same shots: (E[ab] - E[a]E[b]) / shots.
  const double z1 = parity_expectation(h, 0b10).value;
  const double z0z1 = parity_expectation(h, 0b11).value;
  EXPECT_NEAR(reflection_covariance(h, 0b01, 0b10), (z0z1 - 0.4 * z1) / 1000, 1e-15);
  const std::vector<double> exact = {0.5, 0.5, 0, 0};
  EXPECT_DOUBLE_EQ(parity_expectation(Histogram::from_distribution(exact, 2), 0b01).variance, 0.0);
}

TEST(Clipping, ClampsToUnitInterval) {
  EXPECT_EQ(clip_expectation(1.3), 1.0);
  EXPECT_EQ(clip_expectation(-0.5), -0.5);
  EXPECT_EQ(clip_expectations({-2.0, 0.1}), (std::vector<double>{-1.0, 0.1}));
}

// Readouts of the echo model with readout contraction eta and offset b on the
// measurement qubit; sign averaging over +- bases removes b.
std::vector<EvReadout> synthetic_readouts(double f, double theta, double value, double o_phi, double eta,
                                          double offset) {
  std::vector<EvReadout> out;
  for (double alpha : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
    const cplx ref(std::cos(alpha), std::sin(alpha) * o_phi);
    const cplx s = 0.5 * f * std::exp(cplx(0, theta)) * std::conj(ref) * cplx(std::cos(alpha), std::sin(alpha) * value);
    const double x = 2 * s.real(), y = 2 * s.imag();
    const std::pair<TomographyBasis, double> bases[] = {{TomographyBasis::kPlusX, x},
                                                        {TomographyBasis::kMinusX, -x},
                                                        {TomographyBasis::kPlusY, y},
                                                        {TomographyBasis::kMinusY, -y}};
    for (const auto& [basis, v] : bases) {
      const double w = 0.8, d = eta * v + offset;
      out.push_back({alpha, basis, (w + d) / 2, (w - d) / 2, 1 - w});
    }
  }
  return out;
}

TEST(EchoFit, RecoversValueFidelityAndField) {
  for (double o_phi : {1.0, -1.0}) {
    const double kappa = -24, h = 0.013;
    const auto rd = synthetic_readouts(0.35, kappa * h, -0.42, o_phi, 0.9, 0.03);
    const EvFit fit = fit_ev(rd, o_phi, kappa);
    EXPECT_NEAR(fit.value, -0.42, 1e-12);
    EXPECT_NEAR(fit.fidelity, 0.35 * 0.9, 1e-12);
    EXPECT_NEAR(fit.field, h, 1e-12);
    EXPECT_LT(fit.residual, 1e-12);
  }
}

TEST(EchoFit, RejectsTooFewAngles) {
  auto rd = synthetic_readouts(0.5, 0, 0.1, 1, 1, 0);
  rd.resize(8);
  EXPECT_THROW(fit_ev(rd, 1, 1), MitigationError);
}

TEST(EchoFit, BootstrapVarianceFromCounts) {
  auto rd = synthetic_readouts(0.5, 0.2, 0.3, 1, 1, 0);
  for (EvReadout& r : rd) {
    r.m_plus = std::round(r.m_plus * 1e4);
    r.m_minus = std::round(r.m_minus * 1e4);
    r.m_zero = 1e4 - r.m_plus - r.m_minus;
  }
  Rng rng = make_stream(3, 4);
  const MitigatedEstimate e = ev_estimate(rd, 1, -10, &rng, 200);
  EXPECT_NEAR(e.value, 0.3, 5e-3);
  EXPECT_GT(e.variance, 0);
  EXPECT_LT(std::sqrt(e.variance), 0.05);
  EXPECT_EQ(ev_estimate(rd, 1, -10).variance, 0.0);
}

TEST(Loschmidt, AllZerosProbability) {
  MeasurementRecord r;
  r.width = 3;
  r.counts = {{0, 30}, {0b001, 50}, {0b110, 20}};
  EXPECT_DOUBLE_EQ(loschmidt_fidelity(r), 0.3);
  EXPECT_DOUBLE_EQ(loschmidt_fidelity(Histogram::from_record(r)), 0.3);
}

Eigen::MatrixXcd to_matrix(const DensityMatrix& rho) {
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = rho.at(static_cast<size_t>(r), static_cast<size_t>(c));
  }
  return m;
}

class VirtualDistillation : public ::testing::TestWithParam<CircuitMode> {};

TEST_P(VirtualDistillation, MatchesPurifiedExpectation) {
  // Oracle: Tr[rho^2 Z_p] / Tr[rho^2] for the noisy register state rho, with a noiseless tail.
  const int n = 4;
  const PauliSum h = rg_hamiltonian(n, 0.8);
  const std::vector<double> theta = {0.4, -0.3, 0.8, 0.1};
  NoiseModel noise;
  noise.p2 = 0.08;
  noise.amplitude_damping = 0.05;
  for (const VdGroup& g : vd_groups(h, 2)) {
    const VdCircuit vd = build_vd_circuit(n, 2, theta, g, GetParam());
    DensityMatrix reg(n, vd.register_bits);
    apply_circuit(reg, vd.register_circuit, noise);
    DensityMatrix joint = reg.tensor(reg);
    apply_circuit(joint, vd.tail, NoiseModel{});
    const Histogram hist = Histogram::from_distribution(joint.probabilities(), 2 * n);
    const VdResult r = vd_estimate(hist, vd, false);
    const Eigen::MatrixXcd rho = to_matrix(reg), rho2 = rho * rho;
    EXPECT_NEAR(r.purity, rho2.trace().real(), 1e-12);
    for (size_t k = 0; k < vd.observables.size(); ++k) {
      const int q = vd.position[static_cast<size_t>(std::countr_zero(vd.observables[k].logical_zmask))];
      double num = 0;
      for (Eigen::Index i = 0; i < rho2.rows(); ++i) num += ((i >> q) & 1 ? -1.0 : 1.0) * rho2(i, i).real();
      EXPECT_NEAR(r.values[k], num / rho2.trace().real(), 1e-12);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Layouts, VirtualDistillation,
                         ::testing::Values(CircuitMode::kLogical, CircuitMode::kLayoutAware));

TEST(VirtualDistillationClosedForm, MixtureOfOrthogonalStates) {
  // rho = (1-p)|0><0| + p|1><1| on one qubit: <Z>_VD = ((1-p)^2 - p^2) / ((1-p)^2 + p^2).
  const double p = 0.2;
  VdCircuit vd;
  vd.num_qubits = 1;
  vd.position = {0};
  vd.first = {0};
  vd.second = {1};
  vd.observables.push_back({PauliSum(PauliString::single(1, 0, 'Z'), 1.0), 1});
  Circuit tail(2);
  tail.append({Gate::gs(0, 1, kPi / 4)});
  std::vector<double> probs(4, 0.0);
  const double w[2] = {1 - p, p};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      StateVector s(2, static_cast<uint64_t>(a | (b << 1)));
      s.apply(tail);
      const auto pr = s.probabilities();
      for (size_t i = 0; i < 4; ++i) probs[i] += w[a] * w[b] * pr[i];
    }
  }
  const VdResult r = vd_estimate(Histogram::from_distribution(probs, 2), vd, false);
  EXPECT_NEAR(r.values[0], ((1 - p) * (1 - p) - p * p) / ((1 - p) * (1 - p) + p * p), 1e-12);
}

TEST(VirtualDistillation, UnphysicalWithoutClipping) {
  // Asymmetric noise on the two copies can push the unpostselected ratio outside [-1, 1].
  VdCircuit vd;
  vd.num_qubits = 1;
  vd.position = {0};
  vd.first = {0};
  vd.second = {1};
  vd.observables.push_back({PauliSum(PauliString::single(1, 0, 'Z'), 1.0), 1});
  Histogram h;
  h.width = 2;
  h.entries = {{0b00, 0.6}, {0b01, 0.25}, {0b10, 0.15}};
  const VdResult r = vd_estimate(h, vd, false);
  EXPECT_GT(std::abs(r.values[0]), 1.0);
  EXPECT_LE(std::abs(clip_expectation(r.values[0])), 1.0);
}

}  // namespace
}  // namespace pairvqe
