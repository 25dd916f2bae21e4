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

#include "pairvqe/circuits.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace pairvqe {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0, 1);

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int num_params(GateKind kind) {
  switch (kind) {
    case GateKind::kGS:
    case GateKind::kVirtualZ:
    case GateKind::kZZPhase:
    case GateKind::kSqrtSWAP:
    case GateKind::kSqrtISWAP:
      return 1;
    case GateKind::kPhasedXZ:
      return 3;
    default:
      return 0;
  }
}

bool is_two_qubit_kind(GateKind kind) {
  return kind != GateKind::kPhasedXZ && kind != GateKind::kVirtualZ;
}

}  // namespace

std::string gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::kGS:
      return "GS";
    case GateKind::kCZ:
      return "CZ";
    case GateKind::kSWAP:
      return "SWAP";
    case GateKind::kPhasedXZ:
      return "PXZ";
    case GateKind::kVirtualZ:
      return "VZ";
    case GateKind::kSqrtSWAP:
      return "SQRT_SWAP";
    case GateKind::kSqrtISWAP:
      return "SQRT_ISWAP";
    case GateKind::kCNOT:
      return "CNOT";
    case GateKind::kZZPhase:
      return "ZZ";
  }
  return "?";
}

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::kPhasedXZ:
      g.params = {-params[0], params[2] + params[1], -params[2]};
      break;
    case GateKind::kVirtualZ:
    case GateKind::kZZPhase:
    case GateKind::kSqrtSWAP:
    case GateKind::kSqrtISWAP:
      g.params[0] = -params[0];
      break;
    default:
      break;  // GS, CZ, SWAP and CNOT are involutions.
  }
  return g;
}

Eigen::Matrix2cd single_qubit_matrix(const Gate& g) {
  Eigen::Matrix2cd m;
  if (g.kind == GateKind::kVirtualZ) {
    m << std::exp(kI * g.params[0]), 0, 0, std::exp(-kI * g.params[0]);
    return m;
  }
  if (g.kind != GateKind::kPhasedXZ) throw CircuitError(gate_name(g.kind) + " is not a single-qubit gate");
  const double ax = g.params[0], aa = g.params[1], az = g.params[2];
  Eigen::Matrix2cd zl, x, zr;
  zl << std::exp(kI * (az + aa)), 0, 0, std::exp(-kI * (az + aa));
  x << std::cos(ax), kI * std::sin(ax), kI * std::sin(ax), std::cos(ax);
  zr << std::exp(-kI * aa), 0, 0, std::exp(kI * aa);
  return zl * x * zr;
}

Eigen::Matrix4cd two_qubit_matrix(const Gate& g) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  switch (g.kind) {
    case GateKind::kGS: {
      const double c = std::cos(g.params[0]), s = std::sin(g.params[0]);
      m(0, 0) = 1;
      m(1, 1) = s;
      m(1, 2) = c;
      m(2, 1) = c;
      m(2, 2) = -s;
      m(3, 3) = 1;
      break;
    }
    case GateKind::kCZ:
      m.diagonal() << 1, 1, 1, -1;
      break;
    case GateKind::kSWAP:
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
      break;
    case GateKind::kCNOT:
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      break;
    case GateKind::kZZPhase: {
      const cplx p = std::exp(kI * g.params[0]);
      m.diagonal() << p, std::conj(p), std::conj(p), p;
      break;
    }
    case GateKind::kSqrtSWAP: {
      const cplx a = std::exp(-kI * (kPi / 4)) / std::sqrt(2.0);
      const cplx b = std::exp(kI * (kPi / 4)) / std::sqrt(2.0);
      m(0, 0) = m(3, 3) = 1;
      m(1, 1) = m(2, 2) = a;
      m(1, 2) = m(2, 1) = b;
      if (g.params[0] < 0) m = m.adjoint().eval();
      break;
    }
    case GateKind::kSqrtISWAP: {
      const double r = 1.0 / std::sqrt(2.0);
      m(0, 0) = m(3, 3) = 1;
      m(1, 1) = m(2, 2) = r;
      m(1, 2) = m(2, 1) = kI * r;
      if (g.params[0] < 0) m = m.adjoint().eval();
      break;
    }
    default:
      throw CircuitError(gate_name(g.kind) + " is not a two-qubit gate");
  }
  return m;
}

size_t Circuit::two_qubit_depth() const {
  size_t d = 0;
  for (const auto& layer : layers_) {
    if (std::any_of(layer.begin(), layer.end(), [](const Gate& g) { return g.is_two_qubit(); })) ++d;
  }
  return d;
}

size_t Circuit::gate_count() const {
  size_t n = 0;
  for (const auto& layer : layers_) n += layer.size();
  return n;
}

size_t Circuit::two_qubit_gate_count() const {
  size_t n = 0;
  for (const auto& layer : layers_) {
    n += static_cast<size_t>(std::count_if(layer.begin(), layer.end(), [](const Gate& g) { return g.is_two_qubit(); }));
  }
  return n;
}

void Circuit::append(Layer layer) {
  uint64_t used = 0;
  for (const Gate& g : layer) {
    const bool two = is_two_qubit_kind(g.kind);
    if (two != (g.q1 >= 0)) throw CircuitError("wrong arity for " + gate_name(g.kind));
    for (int q : {g.q0, g.q1}) {
      if (q < 0 && q == g.q1) continue;
      if (q < 0 || q >= n_) throw CircuitError("qubit " + std::to_string(q) + " out of range");
      const uint64_t bit = uint64_t{1} << q;
      if (used & bit) throw CircuitError("gates overlap on qubit " + std::to_string(q) + " within a layer");
      used |= bit;
    }
  }
  layers_.push_back(std::move(layer));
}

void Circuit::append(const Circuit& other) {
  if (other.n_ != n_) throw CircuitError("register width mismatch");
  for (const auto& layer : other.layers_) layers_.push_back(layer);
}

Circuit Circuit::inverse() const {
  Circuit out(n_);
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    Layer layer;
    for (const Gate& g : *it) layer.push_back(g.inverse());
    out.layers_.push_back(std::move(layer));
  }
  return out;
}

Circuit Circuit::relabeled(std::span<const int> map, int num_qubits) const {
  Circuit out(num_qubits);
  for (const auto& layer : layers_) {
    Layer l;
    for (Gate g : layer) {
      g.q0 = map[static_cast<size_t>(g.q0)];
      if (g.q1 >= 0) g.q1 = map[static_cast<size_t>(g.q1)];
      l.push_back(g);
    }
    out.append(std::move(l));
  }
  return out;
}

std::string Circuit::dump() const {
  std::ostringstream os;
  for (const auto& layer : layers_) {
    for (size_t k = 0; k < layer.size(); ++k) {
      const Gate& g = layer[k];
      if (k) os << ' ';
      os << gate_name(g.kind) << '(' << g.q0;
      if (g.q1 >= 0) os << ',' << g.q1;
      const int np = num_params(g.kind);
      for (int p = 0; p < np; ++p) os << (p == 0 ? ';' : ',') << fmt(g.params[static_cast<size_t>(p)]);
      os << ')';
    }
    os << '\n';
  }
  return os.str();
}

Circuit Circuit::parse(std::string_view text, int num_qubits) {
  static const GateKind kKinds[] = {GateKind::kGS,       GateKind::kCZ,        GateKind::kSWAP,
                                    GateKind::kPhasedXZ, GateKind::kVirtualZ,  GateKind::kSqrtSWAP,
                                    GateKind::kSqrtISWAP, GateKind::kCNOT,     GateKind::kZZPhase};
  Circuit c(num_qubits);
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    Layer layer;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      const size_t lp = tok.find('(');
      if (lp == std::string::npos || tok.back() != ')') throw CircuitError("bad gate token '" + tok + "'");
      const std::string name = tok.substr(0, lp);
      const auto kind_it = std::find_if(std::begin(kKinds), std::end(kKinds),
                                        [&](GateKind k) { return gate_name(k) == name; });
      if (kind_it == std::end(kKinds)) throw CircuitError("unknown gate '" + name + "'");
      Gate g;
      g.kind = *kind_it;
      std::string body = tok.substr(lp + 1, tok.size() - lp - 2);
      std::string qpart = body, ppart;
      if (const size_t semi = body.find(';'); semi != std::string::npos) {
        qpart = body.substr(0, semi);
        ppart = body.substr(semi + 1);
      }
      std::vector<std::string> qs, ps;
      for (std::string* dst : {&qpart, &ppart}) {
        std::istringstream ss(*dst);
        std::string item;
        while (std::getline(ss, item, ',')) (dst == &qpart ? qs : ps).push_back(item);
      }
      if (qs.empty() || qs.size() > 2 || static_cast<int>(ps.size()) != num_params(g.kind)) {
        throw CircuitError("bad arguments in '" + tok + "'");
      }
      g.q0 = std::stoi(qs[0]);
      g.q1 = qs.size() == 2 ? std::stoi(qs[1]) : -1;
      for (size_t p = 0; p < ps.size(); ++p) g.params[p] = std::stod(ps[p]);
      layer.push_back(g);
    }
    c.append(std::move(layer));
  }
  return c;
}

namespace {

void apply_gate_columns(Eigen::MatrixXcd& u, const Gate& g) {
  const Eigen::Index dim = u.rows();
  if (!g.is_two_qubit()) {
    const Eigen::Matrix2cd m = single_qubit_matrix(g);
    const Eigen::Index bit = Eigen::Index{1} << g.q0;
    for (Eigen::Index b = 0; b < dim; ++b) {
      if (b & bit) continue;
      for (Eigen::Index c = 0; c < u.cols(); ++c) {
        const cplx a0 = u(b, c), a1 = u(b | bit, c);
        u(b, c) = m(0, 0) * a0 + m(0, 1) * a1;
        u(b | bit, c) = m(1, 0) * a0 + m(1, 1) * a1;
      }
    }
    return;
  }
  const Eigen::Matrix4cd m = two_qubit_matrix(g);
  const Eigen::Index b0 = Eigen::Index{1} << g.q0, b1 = Eigen::Index{1} << g.q1;
  for (Eigen::Index b = 0; b < dim; ++b) {
    if (b & (b0 | b1)) continue;
    const Eigen::Index idx[4] = {b, b | b1, b | b0, b | b0 | b1};
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      cplx in[4], out[4];
      for (int k = 0; k < 4; ++k) in[k] = u(idx[k], c);
      for (int r = 0; r < 4; ++r) {
        out[r] = 0;
        for (int k = 0; k < 4; ++k) out[r] += m(r, k) * in[k];
      }
      for (int k = 0; k < 4; ++k) u(idx[k], c) = out[k];
    }
  }
}

}  // namespace

Eigen::MatrixXcd gate_unitary(const Gate& g, int num_qubits) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(Eigen::Index{1} << num_qubits, Eigen::Index{1} << num_qubits);
  apply_gate_columns(u, g);
  return u;
}

Eigen::MatrixXcd circuit_unitary(const Circuit& c) {
  if (c.num_qubits() > 12) throw CircuitError("dense unitary limited to 12 qubits");
  const Eigen::Index dim = Eigen::Index{1} << c.num_qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& layer : c.layers()) {
    for (const Gate& g : layer) apply_gate_columns(u, g);
  }
  return u;
}

double distance_up_to_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const cplx overlap = (b.adjoint() * a).trace();
  const cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

int default_layers(int num_qubits) { return num_qubits / 2; }

int num_parameters(int num_qubits, int layers) { return layers * (num_qubits / 2); }

std::vector<std::pair<int, int>> layer_pairs(int num_qubits, int layer, int shift) {
  if (num_qubits < 2 || num_qubits % 2) throw CircuitError("qubit count must be even and >= 2");
  std::vector<std::pair<int, int>> out;
  const int n = num_qubits;
  for (int k = 0; k < n / 2; ++k) {
    const int a = layer % 2 == 0 ? 2 * k : 2 * k + 1;
    const int b = layer % 2 == 0 ? 2 * k + 1 : (2 * k + 2) % n;
    out.emplace_back((a + shift) % n, (b + shift) % n);
  }
  return out;
}

Circuit build_upccd(int num_qubits, int layers, std::span<const double> theta, int shift) {
  if (static_cast<int>(theta.size()) != num_parameters(num_qubits, layers)) {
    throw CircuitError("expected " + std::to_string(num_parameters(num_qubits, layers)) + " parameters, got " +
                       std::to_string(theta.size()));
  }
  Circuit c(num_qubits);
  size_t t = 0;
  for (int l = 0; l < layers; ++l) {
    Layer layer;
    for (const auto& [a, b] : layer_pairs(num_qubits, l, shift)) layer.push_back(Gate::gs(a, b, theta[t++]));
    c.append(std::move(layer));
  }
  return c;
}

std::vector<int> ansatz_output_positions(int num_qubits, int layers, int shift) {
  std::vector<int> at(static_cast<size_t>(num_qubits));  // physical -> logical
  for (int q = 0; q < num_qubits; ++q) at[static_cast<size_t>((q + shift) % num_qubits)] = q;
  for (int l = 0; l < layers; ++l) {
    for (const auto& [a, b] : layer_pairs(num_qubits, l, shift)) std::swap(at[static_cast<size_t>(a)], at[static_cast<size_t>(b)]);
  }
  std::vector<int> pos(static_cast<size_t>(num_qubits));
  for (int p = 0; p < num_qubits; ++p) pos[static_cast<size_t>(at[static_cast<size_t>(p)])] = p;
  return pos;
}

std::vector<std::pair<int, int>> excitation_schedule(int num_qubits, int layers) {
  std::vector<int> at(static_cast<size_t>(num_qubits));
  for (int q = 0; q < num_qubits; ++q) at[static_cast<size_t>(q)] = q;
  std::vector<std::pair<int, int>> out;
  for (int l = 0; l < layers; ++l) {
    for (const auto& [a, b] : layer_pairs(num_qubits, l)) {
      out.emplace_back(at[static_cast<size_t>(a)], at[static_cast<size_t>(b)]);
      std::swap(at[static_cast<size_t>(a)], at[static_cast<size_t>(b)]);
    }
  }
  return out;
}

std::vector<MeasurementSetting> ladder_measurement_settings(int num_qubits, int layers) {
  const int n = num_qubits;
  std::vector<MeasurementSetting> out;
  for (bool with_swap : {false, true}) {
    for (int k = 0; k < n / 2; ++k) {
      MeasurementSetting s;
      s.shift = k;
      s.swap_layer = with_swap;
      s.position = ansatz_output_positions(n, layers, k);
      std::vector<int> at(static_cast<size_t>(n));
      for (int q = 0; q < n; ++q) at[static_cast<size_t>(s.position[static_cast<size_t>(q)])] = q;
      if (with_swap) {
        // Disjoint SWAPs along the top row of the ladder, offset by the parity of k.
        for (int a = k % 2; a + 1 < n / 2; a += 2) {
          s.swaps.emplace_back(a, a + 1);
          std::swap(at[static_cast<size_t>(a)], at[static_cast<size_t>(a + 1)]);
        }
        for (int p = 0; p < n; ++p) s.position[static_cast<size_t>(at[static_cast<size_t>(p)])] = p;
      }
      for (int i = 0; i < n / 2; ++i) s.pairs.emplace_back(at[static_cast<size_t>(i)], at[static_cast<size_t>(n - 1 - i)]);
      out.push_back(std::move(s));
    }
  }
  return out;
}

CircuitMode parse_circuit_mode(std::string_view name) {
  if (name == "logical") return CircuitMode::kLogical;
  if (name == "layout" || name == "layout_aware") return CircuitMode::kLayoutAware;
  throw CircuitError("unknown circuit mode '" + std::string(name) + "'");
}

uint64_t MeasuredCircuit::physical_mask(uint64_t logical_mask) const {
  uint64_t out = 0;
  for (size_t q = 0; q < position.size(); ++q) {
    if ((logical_mask >> q) & 1) out |= uint64_t{1} << position[q];
  }
  return out;
}

uint64_t MeasuredCircuit::logical_bits(uint64_t physical_bits) const {
  uint64_t out = 0;
  for (size_t q = 0; q < position.size(); ++q) {
    if ((physical_bits >> position[q]) & 1) out |= uint64_t{1} << q;
  }
  return out;
}

namespace {

uint64_t shifted_hf(int n, int shift) {
  uint64_t bits = 0;
  for (int q = 1; q < n; q += 2) bits |= uint64_t{1} << ((q + shift) % n);
  return bits;
}

}  // namespace

MeasuredCircuit build_measurement_circuit(int num_qubits, int layers, std::span<const double> theta,
                                          const MeasurementGroup& group, CircuitMode mode) {
  const int n = num_qubits;
  MeasuredCircuit mc;
  int shift = 0;
  const MeasurementSetting* setting = nullptr;
  std::vector<MeasurementSetting> settings;
  if (group.kind == MeasurementGroup::Kind::kPairRotated && mode == CircuitMode::kLayoutAware) {
    settings = ladder_measurement_settings(n, layers);
    setting = &settings.at(static_cast<size_t>(group.setting));
    shift = setting->shift;
  }
  mc.circuit = build_upccd(n, layers, theta, shift);
  mc.initial_bits = shifted_hf(n, shift);
  mc.position = ansatz_output_positions(n, layers, shift);

  switch (group.kind) {
    case MeasurementGroup::Kind::kComputational:
      break;
    case MeasurementGroup::Kind::kPairRotated: {
      if (setting != nullptr) {
        if (!setting->swaps.empty()) {
          Layer swaps;
          for (const auto& [a, b] : setting->swaps) swaps.push_back(Gate::swap(a, b));
          mc.circuit.append(std::move(swaps));
        }
        mc.position = setting->position;
      }
      Layer rot;
      for (const auto& [a, b] : group.pairs) {
        rot.push_back(Gate::gs(mc.position[static_cast<size_t>(a)], mc.position[static_cast<size_t>(b)], kPi / 4));
      }
      mc.circuit.append(std::move(rot));
      break;
    }
    case MeasurementGroup::Kind::kTermBasis: {
      Layer rot;
      for (int q = 0; q < n; ++q) {
        const char op = group.basis_term.at(q);
        const int p = mc.position[static_cast<size_t>(q)];
        if (op == 'X') rot.push_back(tomography_rotation(p, TomographyBasis::kPlusX));
        if (op == 'Y') rot.push_back(tomography_rotation(p, TomographyBasis::kPlusY));
      }
      if (!rot.empty()) mc.circuit.append(std::move(rot));
      break;
    }
  }
  return mc;
}

Gate tomography_rotation(int qubit, TomographyBasis basis) {
  switch (basis) {
    case TomographyBasis::kPlusX:
      return Gate::phased_xz(qubit, -kPi / 4, kPi / 4, 0);
    case TomographyBasis::kMinusX:
      return Gate::phased_xz(qubit, kPi / 4, kPi / 4, 0);
    case TomographyBasis::kPlusY:
      return Gate::phased_xz(qubit, -kPi / 4, 0, 0);
    case TomographyBasis::kMinusY:
      return Gate::phased_xz(qubit, kPi / 4, 0, 0);
  }
  throw CircuitError("unknown tomography basis");
}

Gate hadamard_like(int qubit) { return Gate::phased_xz(qubit, kPi / 4, kPi / 4, 0); }

// ---------------------------------------------------------------------------

PauliSum EvOperator::pauli(int num_qubits) const {
  switch (kind) {
    case Kind::kIdentity:
      return PauliSum(PauliString(num_qubits), 1.0);
    case Kind::kZ:
      return PauliSum(PauliString::single(num_qubits, a, 'Z'), 1.0);
    case Kind::kZZ:
      return PauliSum(PauliString::z_string(num_qubits, (uint64_t{1} << a) | (uint64_t{1} << b)), 1.0);
    case Kind::kDPlus:
      return d_plus(num_qubits, a, b);
  }
  throw CircuitError("unknown operator kind");
}

EvOperator EvOperator::from_pauli(const PauliSum& op) {
  const int n = op.num_qubits();
  if (op.size() == 1) {
    const auto& [p, c] = *op.terms().begin();
    if (std::abs(c - 1.0) > 1e-12 || !p.is_diagonal()) throw CircuitError("unsupported echo operator");
    if (p.is_identity()) return {Kind::kIdentity, -1, -1};
    const uint64_t z = p.z_mask();
    if (p.weight() == 1) return {Kind::kZ, __builtin_ctzll(z), -1};
    if (p.weight() == 2) return {Kind::kZZ, __builtin_ctzll(z), 63 - __builtin_clzll(z)};
  }
  for (const auto& [p, c] : op.terms()) {
    if (!p.is_diagonal() && p.weight() == 2) {
      const int a = __builtin_ctzll(p.x_mask());
      const int b = 63 - __builtin_clzll(p.x_mask());
      if ((op - d_plus(n, a, b)).simplified(1e-12).empty()) return {Kind::kDPlus, a, b};
    }
  }
  throw CircuitError("unsupported echo operator");
}

std::string EvOperator::name() const {
  switch (kind) {
    case Kind::kIdentity:
      return "I";
    case Kind::kZ:
      return "Z" + std::to_string(a);
    case Kind::kZZ:
      return "Z" + std::to_string(a) + "Z" + std::to_string(b);
    case Kind::kDPlus:
      return "D+" + std::to_string(a) + "," + std::to_string(b);
  }
  return "?";
}

EvCircuit build_ev_circuit(int num_qubits, int layers, std::span<const double> theta, const EvOperator& op,
                           double alpha, TomographyBasis basis) {
  const int n = num_qubits;
  EvCircuit ev;
  ev.circuit = Circuit(n);
  Circuit cat(n);
  // (|0..0> + |1 0..0>) on qubit 0, then move the excitation so the second branch is |0101..01>.
  cat.append({hadamard_like(0)});
  cat.append({Gate::cnot(0, 1)});
  cat.append({Gate::cnot(1, 0)});
  std::vector<int> holders = {1};
  int next = 3;
  while (next < n) {
    Layer layer;
    const size_t h = holders.size();
    for (size_t k = 0; k < h && next < n; ++k, next += 2) {
      layer.push_back(Gate::cnot(holders[k], next));
      holders.push_back(next);
    }
    cat.append(std::move(layer));
  }
  Circuit ladder(n);
  for (size_t l = 1; l < cat.depth(); ++l) ladder.append(cat.layers()[l]);

  ev.circuit.append(cat);
  ev.circuit.append(build_upccd(n, layers, theta));
  ev.head_end = ev.circuit.depth();

  const std::vector<int> pos = ansatz_output_positions(n, layers);
  auto at = [&](int q) { return pos[static_cast<size_t>(q)]; };
  Circuit mapping(n);
  Layer op_layer;
  switch (op.kind) {
    case EvOperator::Kind::kIdentity:
      op_layer.push_back(Gate::virtual_z(0, 0.0));
      ev.op_pauli = PauliString(n);
      break;
    case EvOperator::Kind::kZ:
      op_layer.push_back(Gate::virtual_z(at(op.a), alpha));
      ev.op_pauli = PauliString::single(n, at(op.a), 'Z');
      break;
    case EvOperator::Kind::kZZ:
      op_layer.push_back(Gate::zz_phase(at(op.a), at(op.b), alpha));
      ev.op_pauli = PauliString::z_string(n, (uint64_t{1} << at(op.a)) | (uint64_t{1} << at(op.b)));
      ev.op_virtual = false;
      break;
    case EvOperator::Kind::kDPlus:
      mapping.append({Gate::gs(at(op.a), at(op.b), kPi / 4)});
      op_layer.push_back(Gate::virtual_z(at(op.a), alpha));
      ev.op_pauli = PauliString::single(n, at(op.a), 'Z');
      break;
  }
  ev.circuit.append(mapping);
  ev.op_layer = ev.circuit.depth();
  ev.circuit.append(std::move(op_layer));
  ev.circuit.append(mapping.inverse());
  ev.circuit.append(build_upccd(n, layers, theta).inverse());
  ev.circuit.append(ladder.inverse());
  ev.circuit.append({tomography_rotation(0, basis)});
  ev.measurement_qubit = 0;

  const PauliSum o = op.pauli(n);
  double ref = 0;
  for (const auto& [p, c] : o.terms()) {
    if (p.is_diagonal()) ref += c;
  }
  ev.reference_sign = ref;
  return ev;
}

int ev_circuit_count(const PauliSum& h) { return 12 * static_cast<int>(xxyy_izzi_operators(h).size()); }

// ---------------------------------------------------------------------------

std::vector<std::vector<std::pair<int, int>>> zz_rounds(const PauliSum& h) {
  const int n = h.num_qubits();
  std::set<std::pair<int, int>> wanted;
  for (const auto& [p, c] : h.terms()) {
    if (p.is_diagonal() && p.weight() == 2) {
      wanted.insert({__builtin_ctzll(p.z_mask()), 63 - __builtin_clzll(p.z_mask())});
    }
  }
  std::vector<std::vector<std::pair<int, int>>> rounds;
  if (wanted.empty()) return rounds;
  // Circle method: qubit n-1 stays fixed while the others rotate.
  const int m = n - 1;
  for (int r = 0; r < m; ++r) {
    std::vector<std::pair<int, int>> round;
    auto add = [&](int a, int b) {
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      if (wanted.count(key)) round.push_back(key);
    };
    add(r, n - 1);
    for (int k = 1; k < n / 2; ++k) add((r + k) % m, (r - k + m) % m);
    if (!round.empty()) rounds.push_back(std::move(round));
  }
  return rounds;
}

std::vector<VdGroup> vd_groups(const PauliSum& h, int layers) {
  const int n = h.num_qubits();
  std::vector<VdGroup> out;
  for (auto& g : group_terms(h, MeasurementScheme::kXXplusYY, layers)) {
    VdGroup vg;
    if (g.kind == MeasurementGroup::Kind::kComputational) {
      std::vector<GroupObservable> singles;
      for (auto& o : g.observables) {
        if (__builtin_popcountll(o.logical_zmask) == 1) singles.push_back(o);
      }
      // Z_a must be available even if only ZZ terms mention a.
      g.observables = singles;
      if (g.observables.empty()) continue;
    }
    vg.base = std::move(g);
    out.push_back(std::move(vg));
  }
  for (const auto& round : zz_rounds(h)) {
    VdGroup vg;
    vg.base.kind = MeasurementGroup::Kind::kComputational;
    vg.cnot_pairs = round;
    for (const auto& [a, b] : round) {
      vg.base.observables.push_back(
          {PauliSum(PauliString::z_string(n, (uint64_t{1} << a) | (uint64_t{1} << b)), 1.0), uint64_t{1} << b});
    }
    out.push_back(std::move(vg));
  }
  return out;
}

VdCircuit build_vd_circuit(int num_qubits, int layers, std::span<const double> theta, const VdGroup& group,
                           CircuitMode mode) {
  const int n = num_qubits;
  if (!group.cnot_pairs.empty() && group.base.kind != MeasurementGroup::Kind::kComputational) {
    throw CircuitError("CNOT mapping only combines with the computational group");
  }
  MeasuredCircuit reg = build_measurement_circuit(n, layers, theta, group.base, mode);
  if (!group.cnot_pairs.empty()) {
    Layer l;
    for (const auto& [a, b] : group.cnot_pairs) {
      l.push_back(Gate::cnot(reg.position[static_cast<size_t>(a)], reg.position[static_cast<size_t>(b)]));
    }
    reg.circuit.append(std::move(l));
  }

  VdCircuit vd;
  vd.num_qubits = n;
  vd.position = reg.position;
  vd.circuit = Circuit(2 * n);
  for (const auto& layer : reg.circuit.layers()) {
    Layer both = layer;
    for (Gate g : layer) {
      g.q0 += n;
      if (g.q1 >= 0) g.q1 += n;
      both.push_back(g);
    }
    vd.circuit.append(std::move(both));
  }
  vd.initial_bits = reg.initial_bits | (reg.initial_bits << n);
  vd.register_circuit = reg.circuit;
  vd.register_bits = reg.initial_bits;
  const size_t register_depth = vd.circuit.depth();

  vd.first.assign(static_cast<size_t>(n), -1);
  vd.second.assign(static_cast<size_t>(n), -1);
  if (mode == CircuitMode::kLogical) {
    for (int m = 0; m < n; ++m) {
      vd.first[static_cast<size_t>(m)] = m;
      vd.second[static_cast<size_t>(m)] = n + m;
    }
  } else {
    // Two ladders stacked as rows (copy-1 top, copy-1 bottom, copy-2 top, copy-2 bottom);
    // one SWAP round between the middle rows makes identified qubits adjacent.
    Layer route;
    for (int c = 0; c < n / 2; ++c) {
      route.push_back(Gate::swap(n - 1 - c, n + c));
      vd.first[static_cast<size_t>(c)] = c;
      vd.second[static_cast<size_t>(c)] = n - 1 - c;
      vd.first[static_cast<size_t>(n - 1 - c)] = n + c;
      vd.second[static_cast<size_t>(n - 1 - c)] = 2 * n - 1 - c;
    }
    vd.circuit.append(std::move(route));
  }
  Layer pair_layer;
  for (int m = 0; m < n; ++m) {
    pair_layer.push_back(Gate::gs(vd.first[static_cast<size_t>(m)], vd.second[static_cast<size_t>(m)], kPi / 4));
  }
  vd.circuit.append(std::move(pair_layer));
  vd.tail = Circuit(2 * n);
  for (size_t l = register_depth; l < vd.circuit.depth(); ++l) vd.tail.append(vd.circuit.layers()[l]);

  vd.observables = group.base.observables;
  if (group.cnot_pairs.empty()) {
    vd.symmetry = VdCircuit::Symmetry::kNumber;
    vd.postselect_mask = (2 * n >= 64) ? ~uint64_t{0} : ((uint64_t{1} << (2 * n)) - 1);
    vd.postselect_value = n;
  } else {
    vd.symmetry = VdCircuit::Symmetry::kParity;
    uint64_t mask = (uint64_t{1} << (2 * n)) - 1;
    for (const auto& [a, b] : group.cnot_pairs) {
      const int m = vd.position[static_cast<size_t>(a)];
      mask &= ~(uint64_t{1} << vd.first[static_cast<size_t>(m)]);
      mask &= ~(uint64_t{1} << vd.second[static_cast<size_t>(m)]);
    }
    vd.postselect_mask = mask;
    vd.postselect_value = 0;
  }
  return vd;
}

}  // namespace pairvqe
