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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pairvqe/circuits.hpp"

namespace pairvqe {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Layer> cz_decomposition(int i, int j, double theta) {
  const double ax = kPi / 4 + theta / 2;
  return {
      {Gate::phased_xz(i, kPi / 4, -kPi / 4, 0)},
      {Gate::cz(i, j)},
      {Gate::phased_xz(j, ax, -kPi / 4, kPi / 2), Gate::phased_xz(i, kPi / 4, kPi / 4, 0)},
      {Gate::cz(i, j)},
      {Gate::phased_xz(j, ax, -kPi / 4, kPi / 2), Gate::phased_xz(i, kPi / 4, -kPi / 4, 0)},
      {Gate::cz(i, j)},
      {Gate::phased_xz(i, kPi / 4, kPi / 4, 0)},
  };
}

std::vector<Layer> sqrt_swap_decomposition(int i, int j, double theta) {
  return {
      {Gate::sqrt_swap(i, j)},
      {Gate::virtual_z(i, theta / 2), Gate::virtual_z(j, -theta / 2)},
      {Gate::sqrt_swap(i, j)},
  };
}

// Three sqrt(iSWAP) gates whose middle block is conjugated by exp(i alpha Z) on i.
// |<01|G|01>| = sin^2 alpha, so alpha sets the rotation angle up to Z phases.
std::vector<Layer> sqrt_iswap_core(int i, int j, double alpha) {
  const double q = kPi / 4;
  return {
      {Gate::virtual_z(i, -alpha)},
      {Gate::phased_xz(i, -q, 0, 0), Gate::phased_xz(j, -q, 0, 0)},
      {Gate::sqrt_iswap(i, j)},
      {Gate::phased_xz(i, q, 0, 0), Gate::phased_xz(j, q, 0, 0)},
      {Gate::virtual_z(i, alpha)},
      {Gate::sqrt_iswap(i, j)},
      {Gate::virtual_z(i, -alpha)},
      {Gate::phased_xz(i, -q, q, 0), Gate::phased_xz(j, -q, q, 0)},
      {Gate::sqrt_iswap(i, j)},
      {Gate::phased_xz(i, q, q, 0), Gate::phased_xz(j, q, q, 0)},
      {Gate::virtual_z(i, alpha)},
  };
}

std::vector<Layer> sqrt_iswap_decomposition(int i, int j, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  const double alpha = std::asin(std::sqrt(std::min(1.0, std::abs(s))));
  // Read the Z phases of the core off its matrix: G = e^{i gamma} L GS(theta) R with
  // L = e^{i l1 Z} x e^{i l2 Z}, R = e^{i r1 Z} x 1.
  Circuit probe(2);
  for (const Layer& l : sqrt_iswap_core(1, 0, alpha)) probe.append(l);
  const Eigen::MatrixXcd g = circuit_unitary(probe);  // index 2 b_i + b_j
  const double gamma = (std::arg(g(0, 0)) + std::arg(g(3, 3))) / 2;
  const double a = (std::arg(g(0, 0)) - std::arg(g(3, 3))) / 2;
  const cplx unphase = std::exp(cplx(0, -gamma));
  const double bpc = std::abs(s) > 1e-12 ? std::arg(g(1, 1) * unphase / s) : 0.0;
  const double bmc = std::abs(c) > 1e-12 ? std::arg(g(1, 2) * unphase / c) : 0.0;
  const double b = (bpc + bmc) / 2, cc = (bpc - bmc) / 2;
  const double r1 = cc;
  const double l1 = (a - cc + b) / 2, l2 = (a - cc - b) / 2;

  std::vector<Layer> out;
  out.push_back({Gate::virtual_z(i, -r1)});
  for (const Layer& l : sqrt_iswap_core(i, j, alpha)) out.push_back(l);
  out.push_back({Gate::virtual_z(i, -l1), Gate::virtual_z(j, -l2)});
  return out;
}

}  // namespace

NativeGateSet parse_native_gate_set(std::string_view name) {
  if (name == "cz" || name == "CZ") return NativeGateSet::kCZ;
  if (name == "sqrt_swap" || name == "sqrtSWAP") return NativeGateSet::kSqrtSWAP;
  if (name == "sqrt_iswap" || name == "sqrtiSWAP") return NativeGateSet::kSqrtISWAP;
  throw CircuitError("unknown native gate set '" + std::string(name) + "'");
}

std::vector<Layer> decompose_gs(int i, int j, double theta, NativeGateSet set) {
  switch (set) {
    case NativeGateSet::kCZ:
      return cz_decomposition(i, j, theta);
    case NativeGateSet::kSqrtSWAP:
      return sqrt_swap_decomposition(i, j, theta);
    case NativeGateSet::kSqrtISWAP:
      return sqrt_iswap_decomposition(i, j, theta);
  }
  throw CircuitError("unknown native gate set");
}

Circuit compile_to_native(const Circuit& c, NativeGateSet set) {
  Circuit out(c.num_qubits());
  for (const Layer& layer : c.layers()) {
    std::vector<Layer> merged(1);
    for (const Gate& g : layer) {
      if (g.kind != GateKind::kGS) {
        merged[0].push_back(g);
        continue;
      }
      const std::vector<Layer> parts = decompose_gs(g.q0, g.q1, g.params[0], set);
      if (merged.size() < parts.size()) merged.resize(parts.size());
      for (size_t k = 0; k < parts.size(); ++k) {
        merged[k].insert(merged[k].end(), parts[k].begin(), parts[k].end());
      }
    }
    for (Layer& l : merged) {
      if (!l.empty()) out.append(std::move(l));
    }
  }
  return out;
}

Gate dual_rail_x(int i, int j) { return Gate::gs(i, j, 0.0); }
Gate dual_rail_z(int i, int j) { return Gate::gs(i, j, kPi / 2); }
Gate dual_rail_h(int i, int j) { return Gate::gs(i, j, kPi / 4); }

Circuit dual_rail_ry(double theta) {
  Circuit c(2);
  c.append({Gate::gs(0, 1, theta)});
  c.append({Gate::gs(0, 1, 0.0)});
  return c;
}

Circuit dual_rail_cnot() {
  Circuit c(4);
  c.append({dual_rail_x(0, 1), dual_rail_h(2, 3)});
  c.append({dual_rail_z(1, 2)});
  c.append({dual_rail_x(0, 1), dual_rail_h(2, 3)});
  c.append({dual_rail_z(0, 1)});
  return c;
}

Circuit dual_rail_swap() {
  Circuit c(4);
  c.append({Gate::gs(1, 2, 0.0)});
  c.append({Gate::gs(0, 1, 0.0), Gate::gs(2, 3, 0.0)});
  c.append({Gate::gs(1, 2, 0.0)});
  return c;
}

}  // namespace pairvqe
