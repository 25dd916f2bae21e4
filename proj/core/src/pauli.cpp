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

#include "pairvqe/pauli.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace pairvqe {

namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

int popcount(uint64_t v) { return __builtin_popcountll(v); }

uint64_t width_mask(int n) { return n >= 64 ? ~uint64_t{0} : ((uint64_t{1} << n) - 1); }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

PauliString::PauliString(int num_qubits) : n_(num_qubits) {
  if (num_qubits < 0 || num_qubits > kMaxPauliQubits) {
    throw PauliError("qubit count out of range: " + std::to_string(num_qubits));
  }
}

PauliString::PauliString(int num_qubits, uint64_t x, uint64_t z, int phase)
    : PauliString(num_qubits) {
  if (((x | z) & ~width_mask(num_qubits)) != 0) {
    throw PauliError("mask exceeds qubit count");
  }
  x_ = x;
  z_ = z;
  phase_ = ((phase % 4) + 4) % 4;
}

PauliString PauliString::from_label(std::string_view label) {
  int phase = 0;
  if (!label.empty() && (label[0] == '+' || label[0] == '-')) {
    if (label[0] == '-') phase = 2;
    label.remove_prefix(1);
  }
  if (!label.empty() && label[0] == 'i') {
    phase += 1;
    label.remove_prefix(1);
  }
  PauliString p(static_cast<int>(label.size()));
  for (size_t q = 0; q < label.size(); ++q) p.set(static_cast<int>(q), label[q]);
  p.phase_ = phase % 4;
  return p;
}

PauliString PauliString::single(int num_qubits, int qubit, char op) {
  PauliString p(num_qubits);
  p.set(qubit, op);
  return p;
}

PauliString PauliString::z_string(int num_qubits, uint64_t mask) {
  return PauliString(num_qubits, 0, mask, 0);
}

char PauliString::at(int qubit) const {
  if (qubit < 0 || qubit >= n_) throw PauliError("qubit index out of range");
  const bool x = (x_ >> qubit) & 1;
  const bool z = (z_ >> qubit) & 1;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

void PauliString::set(int qubit, char op) {
  if (qubit < 0 || qubit >= n_) throw PauliError("qubit index out of range");
  const uint64_t bit = uint64_t{1} << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  switch (op) {
    case 'I':
      break;
    case 'X':
      x_ |= bit;
      break;
    case 'Y':
      x_ |= bit;
      z_ |= bit;
      break;
    case 'Z':
      z_ |= bit;
      break;
    default:
      throw PauliError(std::string("invalid Pauli label character '") + op + "'");
  }
}

std::string PauliString::label() const {
  std::string s(static_cast<size_t>(n_), 'I');
  for (int q = 0; q < n_; ++q) s[static_cast<size_t>(q)] = at(q);
  return s;
}

std::string PauliString::to_string() const {
  static const char* kPrefix[4] = {"", "i", "-", "-i"};
  return kPrefix[phase_] + label();
}

int PauliString::weight() const { return popcount(x_ | z_); }

PauliString PauliString::operator*(const PauliString& other) const {
  if (n_ != other.n_) throw PauliError("qubit count mismatch in product");
  // Each factor is i^{phase + |x&z|} X^x Z^z; moving Z^z1 past X^x2 costs (-1)^{|z1&x2|}.
  const uint64_t x = x_ ^ other.x_;
  const uint64_t z = z_ ^ other.z_;
  int ph = phase_ + popcount(x_ & z_) + other.phase_ + popcount(other.x_ & other.z_) +
           2 * popcount(z_ & other.x_) - popcount(x & z);
  return PauliString(n_, x, z, ph);
}

bool PauliString::commutes(const PauliString& other) const {
  if (n_ != other.n_) throw PauliError("qubit count mismatch");
  return ((popcount(x_ & other.z_) + popcount(z_ & other.x_)) & 1) == 0;
}

bool PauliString::qubitwise_commutes(const PauliString& other) const {
  if (n_ != other.n_) throw PauliError("qubit count mismatch");
  const uint64_t support = (x_ | z_) & (other.x_ | other.z_);
  return ((x_ ^ other.x_) & support) == 0 && ((z_ ^ other.z_) & support) == 0;
}

cplx PauliString::apply_to_basis(uint64_t basis, uint64_t* image) const {
  *image = basis ^ x_;
  const int ph = phase_ + popcount(x_ & z_) + 2 * popcount(z_ & basis);
  return kIPow[ph & 3];
}

bool PauliString::operator<(const PauliString& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  if (x_ != o.x_) return x_ < o.x_;
  if (z_ != o.z_) return z_ < o.z_;
  return phase_ < o.phase_;
}

PauliSum::PauliSum(const PauliString& p, double coeff) : n_(p.num_qubits()) { add(p, coeff); }

void PauliSum::check_width(int n) const {
  if (n != n_) {
    throw PauliError("qubit count mismatch: " + std::to_string(n) + " vs " + std::to_string(n_));
  }
}

void PauliSum::add(const PauliString& p, double coeff) {
  if (terms_.empty() && n_ == 0) n_ = p.num_qubits();
  check_width(p.num_qubits());
  if (p.phase() == 1 || p.phase() == 3) {
    throw PauliError("imaginary phase in Hermitian sum: " + p.to_string());
  }
  const double sign = p.phase() == 2 ? -1.0 : 1.0;
  terms_[p.without_phase()] += sign * coeff;
}

void PauliSum::add(std::string_view label, double coeff) { add(PauliString::from_label(label), coeff); }

double PauliSum::coefficient(const PauliString& p) const {
  auto it = terms_.find(p.without_phase());
  if (it == terms_.end()) return 0.0;
  return p.phase() == 2 ? -it->second : it->second;
}

double PauliSum::constant() const { return coefficient(PauliString(n_)); }

PauliSum PauliSum::without_constant() const {
  PauliSum out(n_);
  for (const auto& [p, c] : terms_) {
    if (!p.is_identity()) out.terms_.emplace(p, c);
  }
  return out;
}

PauliSum PauliSum::simplified(double tol) const {
  PauliSum out(n_);
  for (const auto& [p, c] : terms_) {
    if (std::abs(c) > tol) out.terms_.emplace(p, c);
  }
  return out;
}

PauliSum PauliSum::permuted(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != n_) throw PauliError("permutation size mismatch");
  PauliSum out(n_);
  for (const auto& [p, c] : terms_) {
    uint64_t x = 0, z = 0;
    for (int q = 0; q < n_; ++q) {
      const uint64_t dst = uint64_t{1} << perm[static_cast<size_t>(q)];
      if ((p.x_mask() >> q) & 1) x |= dst;
      if ((p.z_mask() >> q) & 1) z |= dst;
    }
    out.terms_[PauliString(n_, x, z)] += c;
  }
  return out;
}

PauliSum PauliSum::embedded(int num_qubits, int offset) const {
  if (offset < 0 || offset + n_ > num_qubits) throw PauliError("embedding out of range");
  PauliSum out(num_qubits);
  for (const auto& [p, c] : terms_) {
    out.terms_[PauliString(num_qubits, p.x_mask() << offset, p.z_mask() << offset)] += c;
  }
  return out;
}

double PauliSum::one_norm() const {
  double s = 0;
  for (const auto& [p, c] : terms_) s += std::abs(c);
  return s;
}

bool PauliSum::is_diagonal() const {
  for (const auto& [p, c] : terms_) {
    if (!p.is_diagonal()) return false;
  }
  return true;
}

PauliSum PauliSum::operator+(const PauliSum& o) const {
  PauliSum out = *this;
  out += o;
  return out;
}

PauliSum PauliSum::operator-(const PauliSum& o) const { return *this + o * -1.0; }

PauliSum PauliSum::operator*(double s) const {
  PauliSum out(n_);
  for (const auto& [p, c] : terms_) out.terms_.emplace(p, c * s);
  return out;
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
  if (terms_.empty() && n_ == 0) n_ = o.n_;
  if (!o.terms_.empty()) check_width(o.n_);
  for (const auto& [p, c] : o.terms_) terms_[p] += c;
  return *this;
}

ComplexPauliMap multiply_complex(const PauliSum& a, const PauliSum& b, double tol) {
  if (a.num_qubits() != b.num_qubits()) throw PauliError("qubit count mismatch in product");
  ComplexPauliMap out;
  for (const auto& [pa, ca] : a.terms()) {
    for (const auto& [pb, cb] : b.terms()) {
      const PauliString prod = pa * pb;
      out[prod.without_phase()] += kIPow[prod.phase()] * (ca * cb);
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    it = std::abs(it->second) <= tol ? out.erase(it) : std::next(it);
  }
  return out;
}

PauliSum PauliSum::multiply(const PauliSum& o, double tol) const {
  const ComplexPauliMap prod = multiply_complex(*this, o, 0.0);
  PauliSum out(n_);
  for (const auto& [p, c] : prod) {
    if (std::abs(c.imag()) > tol) {
      throw PauliError("product is not Hermitian: imaginary coefficient on " + p.label());
    }
    if (c.real() != 0.0) out.terms_.emplace(p, c.real());
  }
  return out;
}

bool commutes(const PauliSum& a, const PauliSum& b, double tol) {
  const ComplexPauliMap ab = multiply_complex(a, b, 0.0);
  ComplexPauliMap ba = multiply_complex(b, a, 0.0);
  for (const auto& [p, c] : ab) ba[p] -= c;
  for (const auto& [p, c] : ba) {
    if (std::abs(c) > tol) return false;
  }
  return true;
}

std::string PauliSum::to_text() const {
  std::ostringstream os;
  for (const auto& [p, c] : terms_) os << format_double(c) << ' ' << p.label() << '\n';
  return os.str();
}

PauliSum PauliSum::from_text(std::string_view text) {
  PauliSum out;
  size_t line_no = 0;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const size_t sp = line.find_first_of(" \t");
    if (sp == std::string_view::npos) {
      throw PauliError("line " + std::to_string(line_no) + ": expected 'coeff label'");
    }
    double coeff = 0;
    const auto res = std::from_chars(line.data(), line.data() + sp, coeff);
    if (res.ec != std::errc() || res.ptr != line.data() + sp) {
      throw PauliError("line " + std::to_string(line_no) + ": bad coefficient");
    }
    std::string_view label = line.substr(sp);
    while (!label.empty() && std::isspace(static_cast<unsigned char>(label.front()))) label.remove_prefix(1);
    out.add(PauliString::from_label(label), coeff);
  }
  return out;
}

cplx expectation(const PauliString& p, std::span<const cplx> psi) {
  const size_t dim = psi.size();
  if (dim != (size_t{1} << p.num_qubits())) throw PauliError("state size does not match qubit count");
  cplx acc = 0;
  uint64_t img = 0;
  for (size_t b = 0; b < dim; ++b) {
    if (psi[b] == cplx(0)) continue;
    const cplx f = p.apply_to_basis(b, &img);
    acc += std::conj(psi[img]) * f * psi[b];
  }
  return acc;
}

cplx expectation_density(const PauliString& p, std::span<const cplx> rho) {
  const size_t dim = size_t{1} << p.num_qubits();
  if (rho.size() != dim * dim) throw PauliError("density size does not match qubit count");
  cplx acc = 0;
  uint64_t img = 0;
  for (size_t b = 0; b < dim; ++b) {
    const cplx f = p.apply_to_basis(b, &img);
    acc += f * rho[b * dim + img];
  }
  return acc;
}

namespace {

double real_checked(cplx v, double scale) {
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, scale)) {
    throw PauliError("expectation has imaginary residual " + format_double(v.imag()));
  }
  return v.real();
}

}  // namespace

double expectation(const PauliSum& h, std::span<const cplx> psi) {
  cplx acc = 0;
  for (const auto& [p, c] : h.terms()) acc += c * expectation(p, psi);
  return real_checked(acc, h.one_norm());
}

double expectation_density(const PauliSum& h, std::span<const cplx> rho) {
  cplx acc = 0;
  for (const auto& [p, c] : h.terms()) acc += c * expectation_density(p, rho);
  return real_checked(acc, h.one_norm());
}

std::vector<cplx> apply(const PauliSum& h, std::span<const cplx> psi) {
  const size_t dim = psi.size();
  if (dim != (size_t{1} << h.num_qubits())) throw PauliError("state size does not match qubit count");
  std::vector<cplx> out(dim, 0.0);
  uint64_t img = 0;
  for (const auto& [p, c] : h.terms()) {
    for (size_t b = 0; b < dim; ++b) {
      if (psi[b] == cplx(0)) continue;
      const cplx f = p.apply_to_basis(b, &img);
      out[img] += c * f * psi[b];
    }
  }
  return out;
}

}  // namespace pairvqe
