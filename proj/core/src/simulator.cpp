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

#include "pairvqe/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace pairvqe {

namespace {

const cplx kI(0, 1);

bool probability_ok(double p) { return std::isfinite(p) && p >= 0 && p <= 1; }

// Index with zero bits inserted at positions lo < hi.
inline size_t insert_two_zeros(size_t k, int lo, int hi) {
  k = ((k >> lo) << (lo + 1)) | (k & ((size_t{1} << lo) - 1));
  k = ((k >> hi) << (hi + 1)) | (k & ((size_t{1} << hi) - 1));
  return k;
}

void kernel_1q(cplx* a, size_t dim, int q, const Eigen::Matrix2cd& m) {
  const size_t stride = size_t{1} << q;
  const cplx m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  for (size_t base = 0; base < dim; base += 2 * stride) {
    for (size_t i = base; i < base + stride; ++i) {
      const cplx a0 = a[i], a1 = a[i + stride];
      a[i] = m00 * a0 + m01 * a1;
      a[i + stride] = m10 * a0 + m11 * a1;
    }
  }
}

void kernel_diag1(cplx* a, size_t dim, int q, cplx d0, cplx d1) {
  const size_t bit = size_t{1} << q;
  for (size_t i = 0; i < dim; ++i) a[i] *= (i & bit) ? d1 : d0;
}

// Applies a gate to the qubits shifted by offset; conjugate uses the complex conjugate matrix.
void kernel_gate(cplx* a, size_t dim, const Gate& g, int offset, bool conjugate) {
  if (!g.is_two_qubit()) {
    const int q = g.q0 + offset;
    if (g.kind == GateKind::kVirtualZ) {
      const double beta = conjugate ? -g.params[0] : g.params[0];
      kernel_diag1(a, dim, q, std::exp(kI * beta), std::exp(-kI * beta));
      return;
    }
    Eigen::Matrix2cd m = single_qubit_matrix(g);
    if (conjugate) m = m.conjugate().eval();
    kernel_1q(a, dim, q, m);
    return;
  }
  const int q0 = g.q0 + offset, q1 = g.q1 + offset;
  const size_t b0 = size_t{1} << q0, b1 = size_t{1} << q1;
  const int lo = std::min(q0, q1), hi = std::max(q0, q1);
  const size_t quarter = dim >> 2;
  switch (g.kind) {
    case GateKind::kGS: {
      const double c = std::cos(g.params[0]), s = std::sin(g.params[0]);
      for (size_t k = 0; k < quarter; ++k) {
        const size_t b = insert_two_zeros(k, lo, hi);
        const cplx x01 = a[b | b1], x10 = a[b | b0];
        a[b | b1] = s * x01 + c * x10;
        a[b | b0] = c * x01 - s * x10;
      }
      return;
    }
    case GateKind::kSWAP:
      for (size_t k = 0; k < quarter; ++k) {
        const size_t b = insert_two_zeros(k, lo, hi);
        std::swap(a[b | b1], a[b | b0]);
      }
      return;
    case GateKind::kCZ:
      for (size_t k = 0; k < quarter; ++k) a[insert_two_zeros(k, lo, hi) | b0 | b1] *= -1.0;
      return;
    case GateKind::kCNOT:
      for (size_t k = 0; k < quarter; ++k) {
        const size_t b = insert_two_zeros(k, lo, hi);
        std::swap(a[b | b0], a[b | b0 | b1]);
      }
      return;
    case GateKind::kZZPhase: {
      const double alpha = conjugate ? -g.params[0] : g.params[0];
      const cplx p = std::exp(kI * alpha), pc = std::conj(p);
      for (size_t k = 0; k < quarter; ++k) {
        const size_t b = insert_two_zeros(k, lo, hi);
        a[b] *= p;
        a[b | b1] *= pc;
        a[b | b0] *= pc;
        a[b | b0 | b1] *= p;
      }
      return;
    }
    default:
      break;
  }
  Eigen::Matrix4cd m = two_qubit_matrix(g);
  if (conjugate) m = m.conjugate().eval();
  for (size_t k = 0; k < quarter; ++k) {
    const size_t b = insert_two_zeros(k, lo, hi);
    const size_t idx[4] = {b, b | b1, b | b0, b | b0 | b1};
    cplx in[4];
    for (int j = 0; j < 4; ++j) in[j] = a[idx[j]];
    for (int r = 0; r < 4; ++r) {
      cplx acc = 0;
      for (int j = 0; j < 4; ++j) acc += m(r, j) * in[j];
      a[idx[r]] = acc;
    }
  }
}

bool layer_is_virtual(const Layer& layer) {
  return std::all_of(layer.begin(), layer.end(), [](const Gate& g) { return g.is_virtual(); });
}

// Random Pauli on the given qubits from a uniform index in [0, 4^k).
void pauli_from_index(uint64_t index, std::span<const int> qubits, uint64_t& x, uint64_t& z) {
  for (int q : qubits) {
    const uint64_t p = index & 3;
    index >>= 2;
    if (p == 1 || p == 2) x ^= uint64_t{1} << q;
    if (p == 2 || p == 3) z ^= uint64_t{1} << q;
  }
}

std::vector<cplx> field_table(int n, double h) {
  std::vector<cplx> t(static_cast<size_t>(n) + 1);
  for (int w = 0; w <= n; ++w) t[static_cast<size_t>(w)] = std::exp(kI * (h * (n - 2 * w)));
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------

void NoiseModel::validate() const {
  const std::pair<const char*, double> checks[] = {
      {"p2", p2}, {"p1", p1}, {"amplitude_damping", amplitude_damping}, {"dephasing", dephasing},
      {"readout_p01", readout_p01}, {"readout_p10", readout_p10}, {"global_survival", global_survival}};
  for (const auto& [name, v] : checks) {
    if (!probability_ok(v)) throw SimulatorError(std::string(name) + " must lie in [0, 1]");
  }
  if (!std::isfinite(field)) throw SimulatorError("field must be finite");
}

bool NoiseModel::is_unitary() const { return p2 == 0 && p1 == 0 && amplitude_damping == 0 && dephasing == 0; }

bool NoiseModel::is_noiseless() const {
  return is_unitary() && field == 0 && readout_p01 == 0 && readout_p10 == 0 && global_survival == 1;
}

NoiseModel NoiseModel::without_readout() const {
  NoiseModel n = *this;
  n.readout_p01 = n.readout_p10 = 0;
  return n;
}

double dephasing_flip_probability(double lambda) { return (1 - std::sqrt(1 - lambda)) / 2; }

namespace {

void check_gate(const Gate& g, int n) {
  if (g.q0 < 0 || g.q0 >= n || g.q1 >= n || g.q0 == g.q1) {
    throw SimulatorError(gate_name(g.kind) + " acts outside the " + std::to_string(n) + "-qubit register");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

StateVector::StateVector(int num_qubits, uint64_t bits, const SimulatorLimits& limits) : n_(num_qubits) {
  if (num_qubits < 1 || num_qubits > 40 || (size_t{1} << num_qubits) > limits.max_pure_amplitudes) {
    throw SimulatorError("state vector of " + std::to_string(num_qubits) + " qubits exceeds the memory bound");
  }
  amps_.assign(size_t{1} << num_qubits, cplx(0));
  amps_.at(bits) = 1;
}

void StateVector::apply(const Gate& g) {
  check_gate(g, n_);
  kernel_gate(amps_.data(), amps_.size(), g, 0, false);
}

void StateVector::apply(const Layer& layer) {
  for (const Gate& g : layer) apply(g);
}

void StateVector::apply(const Circuit& c) {
  if (c.num_qubits() != n_) throw SimulatorError("circuit width does not match the state");
  for (const Layer& l : c.layers()) apply(l);
}

void StateVector::apply_pauli(uint64_t x, uint64_t z) {
  if (z) {
    for (size_t i = 0; i < amps_.size(); ++i) {
      if (__builtin_popcountll(i & z) & 1) amps_[i] = -amps_[i];
    }
  }
  if (x) {
    for (size_t i = 0; i < amps_.size(); ++i) {
      const size_t j = i ^ x;
      if (i < j) std::swap(amps_[i], amps_[j]);
    }
  }
}

void StateVector::apply_field(double h) {
  if (h == 0) return;
  const auto table = field_table(n_, h);
  for (size_t i = 0; i < amps_.size(); ++i) amps_[i] *= table[static_cast<size_t>(__builtin_popcountll(i))];
}

void StateVector::amplitude_damp(int q, double gamma, double u) {
  if (gamma == 0) return;
  const size_t bit = size_t{1} << q;
  double p1 = 0;
  for (size_t i = 0; i < amps_.size(); ++i) {
    if (i & bit) p1 += std::norm(amps_[i]);
  }
  const double total = norm_squared();
  const double p_jump = gamma * p1 / total;
  if (u < p_jump) {
    for (size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) {
        amps_[i ^ bit] = amps_[i];
        amps_[i] = 0;
      }
    }
  } else {
    const double f = std::sqrt(1 - gamma);
    for (size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) amps_[i] *= f;
    }
  }
  normalize();
}

double StateVector::norm_squared() const {
  double s = 0;
  for (const cplx& a : amps_) s += std::norm(a);
  return s;
}

void StateVector::normalize() {
  const double s = norm_squared();
  if (s <= 0) throw SimulatorError("state vector has zero norm");
  const double f = 1 / std::sqrt(s);
  for (cplx& a : amps_) a *= f;
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amps_.size());
  for (size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
  return p;
}

StateVector StateVector::tensor(const StateVector& other, const SimulatorLimits& limits) const {
  StateVector out(n_ + other.n_, 0, limits);
  for (size_t hi = 0; hi < other.amps_.size(); ++hi) {
    for (size_t lo = 0; lo < amps_.size(); ++lo) out.amps_[(hi << n_) | lo] = other.amps_[hi] * amps_[lo];
  }
  return out;
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(int num_qubits, uint64_t bits, const SimulatorLimits& limits) : n_(num_qubits) {
  if (num_qubits < 1 || num_qubits > 20 || (size_t{1} << num_qubits) > limits.max_density_dim) {
    throw SimulatorError("density matrix of " + std::to_string(num_qubits) + " qubits exceeds the memory bound");
  }
  dim_ = size_t{1} << num_qubits;
  rho_.assign(dim_ * dim_, cplx(0));
  rho_.at(bits * dim_ + bits) = 1;
}

DensityMatrix DensityMatrix::from_state(const StateVector& psi, const SimulatorLimits& limits) {
  DensityMatrix rho(psi.num_qubits(), 0, limits);
  const auto a = psi.amplitudes();
  for (size_t r = 0; r < rho.dim_; ++r) {
    for (size_t c = 0; c < rho.dim_; ++c) rho.rho_[r * rho.dim_ + c] = a[r] * std::conj(a[c]);
  }
  return rho;
}

void DensityMatrix::apply(const Gate& g) {
  check_gate(g, n_);
  kernel_gate(rho_.data(), rho_.size(), g, n_, false);
  kernel_gate(rho_.data(), rho_.size(), g, 0, true);
}

void DensityMatrix::apply(const Layer& layer) {
  for (const Gate& g : layer) apply(g);
}

void DensityMatrix::depolarize(int q0, int q1, double p) {
  if (p == 0) return;
  size_t smask = size_t{1} << q0;
  if (q1 >= 0) smask |= size_t{1} << q1;
  const int k = q1 >= 0 ? 2 : 1;
  std::vector<size_t> subs;  // all assignments of the S bits
  for (size_t s = 0; s < dim_; ++s) {
    if ((s & ~smask) == 0) subs.push_back(s);
  }
  const double scale = p / static_cast<double>(size_t{1} << k);
  for (size_t r0 = 0; r0 < dim_; ++r0) {
    if (r0 & smask) continue;
    for (size_t c0 = 0; c0 < dim_; ++c0) {
      if (c0 & smask) continue;
      cplx t = 0;
      for (size_t s : subs) t += rho_[(r0 | s) * dim_ + (c0 | s)];
      for (size_t sr : subs) {
        for (size_t sc : subs) {
          cplx& e = rho_[(r0 | sr) * dim_ + (c0 | sc)];
          e = (1 - p) * e + (sr == sc ? scale * t : cplx(0));
        }
      }
    }
  }
}

void DensityMatrix::dephase(int q, double lambda) {
  if (lambda == 0) return;
  const size_t bit = size_t{1} << q;
  const double f = std::sqrt(1 - lambda);
  for (size_t r = 0; r < dim_; ++r) {
    for (size_t c = 0; c < dim_; ++c) {
      if ((r ^ c) & bit) rho_[r * dim_ + c] *= f;
    }
  }
}

void DensityMatrix::amplitude_damp(int q, double gamma) {
  if (gamma == 0) return;
  const size_t bit = size_t{1} << q;
  const double f = std::sqrt(1 - gamma);
  for (size_t r = 0; r < dim_; ++r) {
    for (size_t c = 0; c < dim_; ++c) {
      const bool rb = r & bit, cb = c & bit;
      if (!rb && !cb) {
        rho_[r * dim_ + c] += gamma * rho_[(r | bit) * dim_ + (c | bit)];
      } else if (rb && cb) {
        rho_[r * dim_ + c] *= (1 - gamma);
      } else {
        rho_[r * dim_ + c] *= f;
      }
    }
  }
}

void DensityMatrix::apply_field(double h) {
  if (h == 0) return;
  for (size_t r = 0; r < dim_; ++r) {
    for (size_t c = 0; c < dim_; ++c) {
      const int dz = 2 * (__builtin_popcountll(c) - __builtin_popcountll(r));
      rho_[r * dim_ + c] *= std::exp(kI * (h * dz));
    }
  }
}

void DensityMatrix::global_depolarize(double survival) {
  if (survival == 1) return;
  for (cplx& e : rho_) e *= survival;
  for (size_t r = 0; r < dim_; ++r) rho_[r * dim_ + r] += (1 - survival) / static_cast<double>(dim_);
}

double DensityMatrix::trace() const {
  double t = 0;
  for (size_t r = 0; r < dim_; ++r) t += rho_[r * dim_ + r].real();
  return t;
}

std::vector<double> DensityMatrix::probabilities() const {
  std::vector<double> p(dim_);
  for (size_t r = 0; r < dim_; ++r) p[r] = std::max(0.0, rho_[r * dim_ + r].real());
  return p;
}

DensityMatrix DensityMatrix::tensor(const DensityMatrix& other, const SimulatorLimits& limits) const {
  DensityMatrix out(n_ + other.n_, 0, limits);
  out.rho_[0] = 0;
  for (size_t r2 = 0; r2 < other.dim_; ++r2) {
    for (size_t c2 = 0; c2 < other.dim_; ++c2) {
      const cplx v2 = other.rho_[r2 * other.dim_ + c2];
      if (v2 == cplx(0)) continue;
      for (size_t r1 = 0; r1 < dim_; ++r1) {
        for (size_t c1 = 0; c1 < dim_; ++c1) {
          out.rho_[((r2 << n_) | r1) * out.dim_ + ((c2 << n_) | c1)] = v2 * rho_[r1 * dim_ + c1];
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void apply_noisy_layer(std::span<StateVector* const> states, const Layer& layer, const NoiseModel& noise, Rng& rng) {
  if (states.empty()) return;
  if (states.size() > 1 && !noise.pauli_only()) throw SimulatorError("shared-draw evolution needs Pauli noise");
  const int n = states[0]->num_qubits();
  uint64_t x = 0, z = 0;
  for (const Gate& g : layer) {
    for (StateVector* s : states) s->apply(g);
    if (g.is_two_qubit()) {
      if (noise.p2 > 0 && uniform01(rng) < noise.p2) {
        const int qs[2] = {g.q0, g.q1};
        pauli_from_index(rng() & 15, qs, x, z);
      }
    } else if (!g.is_virtual() && noise.p1 > 0 && uniform01(rng) < noise.p1) {
      const int qs[1] = {g.q0};
      pauli_from_index(rng() & 3, qs, x, z);
    }
  }
  if (layer_is_virtual(layer)) {
    if (x | z) for (StateVector* s : states) s->apply_pauli(x, z);
    return;
  }
  if (noise.amplitude_damping > 0) {
    if (x | z) states[0]->apply_pauli(x, z);
    x = z = 0;
    for (int q = 0; q < n; ++q) states[0]->amplitude_damp(q, noise.amplitude_damping, uniform01(rng));
  }
  if (noise.dephasing > 0) {
    const double pz = dephasing_flip_probability(noise.dephasing);
    for (int q = 0; q < n; ++q) {
      if (uniform01(rng) < pz) z ^= uint64_t{1} << q;
    }
  }
  for (StateVector* s : states) {
    if (x | z) s->apply_pauli(x, z);
    s->apply_field(noise.field);
  }
}

void apply_noisy_layer(DensityMatrix& rho, const Layer& layer, const NoiseModel& noise) {
  for (const Gate& g : layer) {
    rho.apply(g);
    if (g.is_two_qubit()) {
      rho.depolarize(g.q0, g.q1, noise.p2);
    } else if (!g.is_virtual()) {
      rho.depolarize(g.q0, -1, noise.p1);
    }
  }
  if (layer_is_virtual(layer)) return;
  for (int q = 0; q < rho.num_qubits(); ++q) {
    rho.amplitude_damp(q, noise.amplitude_damping);
    rho.dephase(q, noise.dephasing);
  }
  rho.apply_field(noise.field);
}

void apply_circuit(StateVector& psi, const Circuit& c, const NoiseModel& noise, Rng& rng) {
  if (c.num_qubits() != psi.num_qubits()) throw SimulatorError("circuit width does not match the state");
  StateVector* states[1] = {&psi};
  for (const Layer& l : c.layers()) apply_noisy_layer(states, l, noise, rng);
  if (noise.global_survival < 1 && uniform01(rng) >= noise.global_survival) {
    const int n = psi.num_qubits();
    const uint64_t mask = n >= 64 ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
    psi.apply_pauli(rng() & mask, rng() & mask);
  }
}

void apply_circuit(DensityMatrix& rho, const Circuit& c, const NoiseModel& noise) {
  if (c.num_qubits() != rho.num_qubits()) throw SimulatorError("circuit width does not match the state");
  for (const Layer& l : c.layers()) apply_noisy_layer(rho, l, noise);
  rho.global_depolarize(noise.global_survival);
}

SimulationMode parse_simulation_mode(std::string_view name) {
  if (name == "auto") return SimulationMode::kAuto;
  if (name == "pure" || name == "trajectories") return SimulationMode::kPure;
  if (name == "density") return SimulationMode::kDensity;
  throw SimulatorError("unknown simulation mode '" + std::string(name) + "'");
}

SimulationMode resolve_mode(int num_qubits, const NoiseModel& noise, const SimulationOptions& options) {
  if (options.mode != SimulationMode::kAuto) return options.mode;
  if (noise.is_unitary()) return SimulationMode::kPure;
  const bool density_fits = (size_t{1} << num_qubits) <= options.limits.max_density_dim;
  return density_fits && num_qubits <= options.auto_density_qubits ? SimulationMode::kDensity : SimulationMode::kPure;
}

size_t num_blocks(size_t count) { return std::min<size_t>(count, 16); }

void parallel_blocks(size_t count, int workers, const std::function<void(size_t, size_t, size_t)>& fn) {
  const size_t blocks = num_blocks(count);
  auto range = [&](size_t b) { return std::pair<size_t, size_t>{b * count / blocks, (b + 1) * count / blocks}; };
  if (workers <= 1 || blocks <= 1) {
    for (size_t b = 0; b < blocks; ++b) {
      const auto [lo, hi] = range(b);
      fn(b, lo, hi);
    }
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < std::min<int>(workers, static_cast<int>(blocks)); ++w) {
    pool.emplace_back([&] {
      for (size_t b = next++; b < blocks; b = next++) {
        try {
          const auto [lo, hi] = range(b);
          fn(b, lo, hi);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> output_distribution(const Circuit& c, uint64_t initial_bits, const NoiseModel& noise,
                                        const SimulationOptions& options, uint64_t circuit_id) {
  noise.validate();
  const int n = c.num_qubits();
  const SimulationMode mode = resolve_mode(n, noise, options);
  std::vector<double> dist;
  if (mode == SimulationMode::kDensity) {
    DensityMatrix rho(n, initial_bits, options.limits);
    apply_circuit(rho, c, noise);
    return rho.probabilities();
  }
  NoiseModel inner = noise;
  inner.global_survival = 1;
  if (noise.is_unitary()) {
    StateVector psi(n, initial_bits, options.limits);
    Rng rng = make_stream(options.seed, circuit_id, 0);
    apply_circuit(psi, c, inner, rng);
    dist = psi.probabilities();
  } else {
    const size_t traj = static_cast<size_t>(std::max(1, options.trajectories));
    std::vector<std::vector<double>> partial(num_blocks(traj));
    parallel_blocks(traj, options.workers, [&](size_t b, size_t lo, size_t hi) {
      std::vector<double> acc(size_t{1} << n, 0.0);
      for (size_t t = lo; t < hi; ++t) {
        StateVector psi(n, initial_bits, options.limits);
        Rng rng = make_stream(options.seed, circuit_id, t);
        apply_circuit(psi, c, inner, rng);
        const auto a = psi.amplitudes();
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(a[i]);
      }
      partial[b] = std::move(acc);
    });
    dist.assign(size_t{1} << n, 0.0);
    for (const auto& p : partial) {
      for (size_t i = 0; i < dist.size(); ++i) dist[i] += p[i];
    }
    for (double& d : dist) d /= static_cast<double>(traj);
  }
  if (noise.global_survival < 1) {
    const double uniform = (1 - noise.global_survival) / static_cast<double>(dist.size());
    for (double& d : dist) d = noise.global_survival * d + uniform;
  }
  return dist;
}

void apply_readout(std::vector<double>& dist, int num_qubits, double p01, double p10) {
  if (p01 == 0 && p10 == 0) return;
  for (int q = 0; q < num_qubits; ++q) {
    const size_t bit = size_t{1} << q;
    for (size_t i = 0; i < dist.size(); ++i) {
      if (i & bit) continue;
      const double a0 = dist[i], a1 = dist[i | bit];
      dist[i] = (1 - p01) * a0 + p10 * a1;
      dist[i | bit] = p01 * a0 + (1 - p10) * a1;
    }
  }
}

// ---------------------------------------------------------------------------

std::string bitstring(uint64_t bits, int width) {
  std::string s(static_cast<size_t>(width), '0');
  for (int q = 0; q < width; ++q) {
    if ((bits >> q) & 1) s[static_cast<size_t>(q)] = '1';
  }
  return s;
}

uint64_t parse_bitstring(std::string_view text) {
  if (text.empty() || text.size() > 64) throw SimulatorError("bad bitstring '" + std::string(text) + "'");
  uint64_t bits = 0;
  for (size_t q = 0; q < text.size(); ++q) {
    if (text[q] == '1') {
      bits |= uint64_t{1} << q;
    } else if (text[q] != '0') {
      throw SimulatorError("bad bitstring '" + std::string(text) + "'");
    }
  }
  return bits;
}

uint64_t MeasurementRecord::total() const {
  uint64_t t = 0;
  for (const auto& [b, c] : counts) t += c;
  return t;
}

std::string MeasurementRecord::to_text() const {
  std::ostringstream os;
  os << "# circuit_id " << circuit_id << '\n' << "# width " << width << '\n';
  for (const auto& [k, v] : metadata) os << "# " << k << ' ' << v << '\n';
  for (const auto& [b, c] : counts) os << bitstring(b, width) << ' ' << c << '\n';
  return os.str();
}

MeasurementRecord MeasurementRecord::from_text(std::string_view text) {
  MeasurementRecord r;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key, value;
      ls >> hash >> key;
      std::getline(ls >> std::ws, value);
      if (key == "circuit_id") {
        r.circuit_id = value;
      } else if (key == "width") {
        r.width = std::stoi(value);
      } else {
        r.metadata[key] = value;
      }
      continue;
    }
    std::string bits;
    uint64_t count = 0;
    if (!(ls >> bits >> count)) throw SimulatorError("bad record line '" + line + "'");
    if (static_cast<int>(bits.size()) != r.width) throw SimulatorError("bitstring width mismatch");
    r.counts[parse_bitstring(bits)] += count;
  }
  return r;
}

MeasurementRecord sample_distribution(std::span<const double> dist, int width, uint64_t shots, Rng& rng) {
  if (shots == 0) throw SimulatorError("number of shots must be positive");
  MeasurementRecord rec;
  rec.width = width;
  double mass = 0;
  for (double p : dist) mass += std::max(0.0, p);
  uint64_t remaining = shots;
  for (size_t i = 0; i < dist.size() && remaining > 0; ++i) {
    const double p = std::max(0.0, dist[i]);
    if (p == 0) continue;
    uint64_t k = remaining;
    if (mass > p) {
      std::binomial_distribution<uint64_t> bin(remaining, std::clamp(p / mass, 0.0, 1.0));
      k = bin(rng);
    }
    if (k) rec.counts[i] = k;
    remaining -= k;
    mass -= p;
  }
  return rec;
}

MeasurementRecord sample(const StateVector& psi, uint64_t shots, double p01, double p10, uint64_t seed) {
  std::vector<double> dist = psi.probabilities();
  apply_readout(dist, psi.num_qubits(), p01, p10);
  Rng rng = make_stream(seed, 0, 0);
  return sample_distribution(dist, psi.num_qubits(), shots, rng);
}

MeasurementRecord sample(const DensityMatrix& rho, uint64_t shots, double p01, double p10, uint64_t seed) {
  std::vector<double> dist = rho.probabilities();
  apply_readout(dist, rho.num_qubits(), p01, p10);
  Rng rng = make_stream(seed, 0, 0);
  return sample_distribution(dist, rho.num_qubits(), shots, rng);
}

}  // namespace pairvqe
