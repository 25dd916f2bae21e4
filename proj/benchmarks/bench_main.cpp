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

#include <benchmark/benchmark.h>

#include <random>

#include "pairvqe/circuits.hpp"
#include "pairvqe/estimation.hpp"
#include "pairvqe/pipeline.hpp"

namespace pairvqe {
namespace {

std::vector<double> random_theta(int n) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> t(static_cast<size_t>(num_parameters(n, default_layers(n))));
  for (double& x : t) x = u(gen);
  return t;
}

void BM_AnsatzStateVector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto theta = random_theta(n);
  for (auto _ : state) benchmark::DoNotOptimize(ansatz_state(n, default_layers(n), theta));
}
BENCHMARK(BM_AnsatzStateVector)->Arg(6)->Arg(10)->Arg(14);

void BM_NoisyAnsatzDensity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto theta = random_theta(n);
  NoiseModel noise;
  noise.p2 = 0.01;
  noise.amplitude_damping = 0.01;
  const Circuit c = build_upccd(n, default_layers(n), theta);
  for (auto _ : state) {
    DensityMatrix rho(n, hartree_fock_bits(n));
    apply_circuit(rho, c, noise);
    benchmark::DoNotOptimize(rho);
  }
}
BENCHMARK(BM_NoisyAnsatzDensity)->Arg(4)->Arg(6);

void BM_EnergyEstimate(benchmark::State& state) {
  const int n = 6;
  const auto method = static_cast<Method>(state.range(0));
  const PauliSum h = rg_hamiltonian(n, -0.9);
  const auto theta = random_theta(n);
  NoiseModel noise;
  noise.p2 = 0.02;
  noise.readout_p10 = 0.02;
  EstimationSettings s;
  s.shots = 10000;
  s.sim.mode = SimulationMode::kPure;
  s.sim.trajectories = 100;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_energy(h, theta, method, noise, s));
  state.SetLabel(method_name(method));
}
BENCHMARK(BM_EnergyEstimate)
    ->Arg(static_cast<int>(Method::kRaw))
    ->Arg(static_cast<int>(Method::kEV))
    ->Arg(static_cast<int>(Method::kPSVD))
    ->Unit(benchmark::kMillisecond);

void BM_OptimalCoefficients(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  CoefficientProblem p;
  p.q = Eigen::MatrixXd::NullaryExpr(m, m / 2, [&] { return nd(gen); });
  p.h = p.q.transpose() * Eigen::VectorXd::Ones(m);
  const Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(m, m, [&] { return nd(gen); });
  p.sigma = a * a.transpose() + Eigen::MatrixXd::Identity(m, m);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_coefficients(p));
}
BENCHMARK(BM_OptimalCoefficients)->Arg(16)->Arg(64);

}  // namespace
}  // namespace pairvqe

BENCHMARK_MAIN();
