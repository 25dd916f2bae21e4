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

#include "pairvqe/models.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "pairvqe/circuits.hpp"

namespace pairvqe {

OrbitalOrdering interleaved_ordering(int num_orbitals) {
  if (num_orbitals <= 0 || num_orbitals % 2 != 0) {
    throw ModelError("orbital count must be positive and even");
  }
  OrbitalOrdering o;
  o.qubit_of_orbital.assign(static_cast<size_t>(num_orbitals), -1);
  o.orbital_of_qubit.assign(static_cast<size_t>(num_orbitals), -1);
  const int half = num_orbitals / 2;
  for (int k = 0; k < half; ++k) {
    o.qubit_of_orbital[static_cast<size_t>(k)] = 2 * k + 1;
    o.qubit_of_orbital[static_cast<size_t>(half + k)] = 2 * k;
  }
  for (int p = 0; p < num_orbitals; ++p) {
    o.orbital_of_qubit[static_cast<size_t>(o.qubit_of_orbital[static_cast<size_t>(p)])] = p;
  }
  return o;
}

uint64_t hartree_fock_bits(int num_qubits) {
  uint64_t bits = 0;
  for (int q = 1; q < num_qubits; q += 2) bits |= uint64_t{1} << q;
  return bits;
}

std::vector<double> rg_single_particle_energies(int num_orbitals) {
  std::vector<double> eps(static_cast<size_t>(num_orbitals));
  const double mu = 0.5 * (num_orbitals + 1);
  for (int p = 1; p <= num_orbitals; ++p) eps[static_cast<size_t>(p - 1)] = p - mu;
  return eps;
}

PauliSum pair_hamiltonian(std::span<const double> diag, const Eigen::MatrixXd& pair_int,
                          const Eigen::MatrixXd& hop, const OrbitalOrdering& ordering) {
  const int n = ordering.size();
  if (static_cast<int>(diag.size()) != n || pair_int.rows() != n || pair_int.cols() != n ||
      hop.rows() != n || hop.cols() != n) {
    throw ModelError("integral dimensions do not match orbital count");
  }
  PauliSum h(n);
  const PauliString id(n);
  auto q_of = [&](int p) { return ordering.qubit_of_orbital[static_cast<size_t>(p)]; };
  auto z = [&](int p) { return PauliString::single(n, q_of(p), 'Z'); };
  for (int p = 0; p < n; ++p) {
    const double d = diag[static_cast<size_t>(p)] + 0.5 * hop(p, p);
    h.add(id, d);
    h.add(z(p), -d);
  }
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const double w = pair_int(p, q);
      if (w != 0.0) {
        h.add(id, w);
        h.add(z(p), -w);
        h.add(z(q), -w);
        h.add(z(p) * z(q), w);
      }
      const double t = hop(p, q);
      if (t != 0.0) {
        PauliString xx(n), yy(n);
        xx.set(q_of(p), 'X');
        xx.set(q_of(q), 'X');
        yy.set(q_of(p), 'Y');
        yy.set(q_of(q), 'Y');
        h.add(xx, 0.5 * t);
        h.add(yy, 0.5 * t);
      }
    }
  }
  return h.simplified(0.0);
}

PauliSum rg_hamiltonian(int num_orbitals, double g, const OrbitalOrdering& ordering) {
  const std::vector<double> eps = rg_single_particle_energies(num_orbitals);
  Eigen::MatrixXd hop = Eigen::MatrixXd::Constant(num_orbitals, num_orbitals, g);
  hop.diagonal().setZero();
  return pair_hamiltonian(eps, Eigen::MatrixXd::Zero(num_orbitals, num_orbitals), hop, ordering);
}

PauliSum rg_hamiltonian(int num_orbitals, double g) {
  return rg_hamiltonian(num_orbitals, g, interleaved_ordering(num_orbitals));
}

SeniorityZeroSpec::SeniorityZeroSpec(int n)
    : num_orbitals(n),
      h(static_cast<size_t>(n), 0.0),
      coulomb(Eigen::MatrixXd::Zero(n, n)),
      exchange(Eigen::MatrixXd::Zero(n, n)),
      pair(Eigen::MatrixXd::Zero(n, n)) {}

void SeniorityZeroSpec::validate() const {
  const int n = num_orbitals;
  if (n <= 0 || static_cast<int>(h.size()) != n || coulomb.rows() != n || exchange.rows() != n ||
      pair.rows() != n) {
    throw ModelError("integral dimensions do not match orbital count");
  }
  for (double v : h) {
    if (!std::isfinite(v)) throw ModelError("non-finite one-body integral");
  }
  const std::pair<const Eigen::MatrixXd*, const char*> mats[] = {
      {&coulomb, "Vpqpq"}, {&exchange, "Vpqqp"}, {&pair, "Vppqq"}};
  for (const auto& [m, name] : mats) {
    if (!m->allFinite()) throw ModelError(std::string("non-finite entries in ") + name);
    if ((*m - m->transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      throw ModelError(std::string(name) + " is not symmetric");
    }
  }
}

namespace {

double parse_number(std::string_view tok, int line_no) {
  double v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ModelError("line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

int parse_index(std::string_view tok, int n, int line_no) {
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 0 || v >= n) {
    throw ModelError("line " + std::to_string(line_no) + ": bad orbital index '" + std::string(tok) +
                     "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

SeniorityZeroSpec SeniorityZeroSpec::parse(std::string_view text) {
  SeniorityZeroSpec spec;
  bool have_header = false;
  std::set<std::tuple<int, int, int>> seen;
  int line_no = 0;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok[0] == "norb") {
      if (tok.size() != 2 || have_header) throw ModelError("line " + std::to_string(line_no) + ": bad header");
      const int n = static_cast<int>(parse_number(tok[1], line_no));
      if (n <= 0) throw ModelError("orbital count must be positive");
      spec = SeniorityZeroSpec(n);
      have_header = true;
      continue;
    }
    if (!have_header) throw ModelError("missing 'norb' header");
    const int n = spec.num_orbitals;
    if (tok[0] == "h") {
      if (tok.size() != 3) throw ModelError("line " + std::to_string(line_no) + ": expected 'h p v'");
      spec.h[static_cast<size_t>(parse_index(tok[1], n, line_no))] = parse_number(tok[2], line_no);
      continue;
    }
    int which = -1;
    if (tok[0] == "Vpqpq") which = 0;
    if (tok[0] == "Vpqqp") which = 1;
    if (tok[0] == "Vppqq") which = 2;
    if (which < 0 || tok.size() != 4) {
      throw ModelError("line " + std::to_string(line_no) + ": unknown record '" + std::string(tok[0]) + "'");
    }
    const int p = parse_index(tok[1], n, line_no);
    const int q = parse_index(tok[2], n, line_no);
    const double v = parse_number(tok[3], line_no);
    Eigen::MatrixXd& m = which == 0 ? spec.coulomb : which == 1 ? spec.exchange : spec.pair;
    if (seen.count({which, q, p}) && std::abs(m(q, p) - v) > 1e-10) {
      throw ModelError("line " + std::to_string(line_no) + ": " + std::string(tok[0]) +
                       " is not symmetric in (" + std::to_string(p) + "," + std::to_string(q) + ")");
    }
    seen.insert({which, p, q});
    m(p, q) = v;
    m(q, p) = v;
  }
  if (!have_header) throw ModelError("missing 'norb' header");
  spec.validate();
  return spec;
}

std::string SeniorityZeroSpec::to_text() const {
  std::ostringstream os;
  os << "norb " << num_orbitals << '\n';
  for (int p = 0; p < num_orbitals; ++p) os << "h " << p << ' ' << fmt(h[static_cast<size_t>(p)]) << '\n';
  const std::pair<const Eigen::MatrixXd*, const char*> mats[] = {
      {&coulomb, "Vpqpq"}, {&exchange, "Vpqqp"}, {&pair, "Vppqq"}};
  for (const auto& [m, name] : mats) {
    for (int p = 0; p < num_orbitals; ++p) {
      for (int q = p; q < num_orbitals; ++q) {
        if ((*m)(p, q) != 0.0) os << name << ' ' << p << ' ' << q << ' ' << fmt((*m)(p, q)) << '\n';
      }
    }
  }
  return os.str();
}

PauliSum chem_hamiltonian(const SeniorityZeroSpec& spec, const OrbitalOrdering& ordering) {
  spec.validate();
  const int n = spec.num_orbitals;
  Eigen::MatrixXd pair_int = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      // Both orderings of the 1/4 sum land on the same unordered pair.
      pair_int(p, q) = 0.5 * (2.0 * spec.coulomb(p, q) - spec.exchange(p, q));
    }
  }
  return pair_hamiltonian(spec.h, pair_int, spec.pair, ordering);
}

PauliSum chem_hamiltonian(const SeniorityZeroSpec& spec) {
  return chem_hamiltonian(spec, interleaved_ordering(spec.num_orbitals));
}

std::vector<uint64_t> sector_basis(int num_qubits, int weight) {
  if (num_qubits < 0 || num_qubits > 62 || weight < 0 || weight > num_qubits) {
    throw ModelError("invalid sector");
  }
  std::vector<uint64_t> out;
  if (weight == 0) return {0};
  // Gosper's hack enumerates fixed-weight words in increasing order.
  uint64_t v = (uint64_t{1} << weight) - 1;
  const uint64_t limit = uint64_t{1} << num_qubits;
  while (v < limit) {
    out.push_back(v);
    const uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & -~t) - 1) >> (__builtin_ctzll(v) + 1));
  }
  return out;
}

Eigen::MatrixXd sector_matrix(const PauliSum& h, std::span<const uint64_t> basis) {
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  std::map<uint64_t, cplx> outside;
  uint64_t img = 0;
  for (Eigen::Index col = 0; col < dim; ++col) {
    outside.clear();
    for (const auto& [p, c] : h.terms()) {
      const cplx f = p.apply_to_basis(basis[static_cast<size_t>(col)], &img);
      auto it = std::lower_bound(basis.begin(), basis.end(), img);
      if (it == basis.end() || *it != img) {
        outside[img] += c * f;
      } else {
        m(it - basis.begin(), col) += c * f;
      }
    }
    for (const auto& [bits, amp] : outside) {
      if (std::abs(amp) > 1e-10) throw ModelError("operator leaves the requested sector");
    }
  }
  if (m.imag().cwiseAbs().maxCoeff() > 1e-10) throw ModelError("sector matrix is not real");
  return m.real();
}

DociResult doci_solve(const PauliSum& h, int num_pairs) {
  if (h.num_qubits() > 14) throw ModelError("dense DOCI limited to 14 orbitals");
  DociResult r;
  r.basis = sector_basis(h.num_qubits(), num_pairs);
  const Eigen::MatrixXd m = sector_matrix(h, r.basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw ModelError("eigensolver failed");
  r.spectrum = es.eigenvalues();
  r.energy = es.eigenvalues()(0);
  r.ground_state = es.eigenvectors().col(0);
  return r;
}

double order_parameter(std::span<const double> occupations) {
  if (occupations.empty()) throw ModelError("no occupations");
  double acc = 0;
  for (double n : occupations) {
    if (!std::isfinite(n) || n < -0.05 || n > 1.05) {
      throw ModelError("occupation " + fmt(n) + " outside [-0.05, 1.05]");
    }
    const double c = std::clamp(n, 0.0, 1.0);
    acc += std::sqrt(c - c * c);
  }
  return 2.0 * acc / static_cast<double>(occupations.size());
}

double order_parameter_spin_derivative(double occupation, int num_orbitals) {
  const double n = occupation;
  if (!(n > 0.0 && n < 1.0)) throw ModelError("derivative undefined at the boundary");
  return (1.0 - 2.0 * n) / (2.0 * num_orbitals * std::sqrt(n - n * n));
}

std::vector<double> occupations_from_z(std::span<const double> z_expectations) {
  std::vector<double> out;
  out.reserve(z_expectations.size());
  for (double z : z_expectations) out.push_back(0.5 * (1.0 - z));
  return out;
}

namespace {

PauliSum hopping(int n, int i, int j) {
  PauliString xx(n), yy(n);
  xx.set(i, 'X');
  xx.set(j, 'X');
  yy.set(i, 'Y');
  yy.set(j, 'Y');
  PauliSum s(n);
  s.add(xx, 1.0);
  s.add(yy, 1.0);
  return s;
}

PauliSum z_sum(int n, int i, int j) {
  PauliSum s(n);
  s.add(PauliString::single(n, i, 'Z'), 1.0);
  s.add(PauliString::single(n, j, 'Z'), 1.0);
  return s;
}

}  // namespace

PauliSum d_plus(int num_qubits, int i, int j) {
  return (z_sum(num_qubits, i, j) + hopping(num_qubits, i, j)) * 0.5;
}

PauliSum d_minus(int num_qubits, int i, int j) {
  return (z_sum(num_qubits, i, j) - hopping(num_qubits, i, j)) * 0.5;
}

MeasurementScheme parse_scheme(std::string_view name) {
  if (name == "termwise") return MeasurementScheme::kTermwise;
  if (name == "xx_plus_yy" || name == "XXplusYY") return MeasurementScheme::kXXplusYY;
  if (name == "xxyy_izzi" || name == "XXYYIZZI") return MeasurementScheme::kXXYYIZZI;
  throw ModelError("unknown measurement scheme '" + std::string(name) + "'");
}

std::string scheme_name(MeasurementScheme scheme) {
  switch (scheme) {
    case MeasurementScheme::kTermwise:
      return "termwise";
    case MeasurementScheme::kXXplusYY:
      return "xx_plus_yy";
    case MeasurementScheme::kXXYYIZZI:
      return "xxyy_izzi";
  }
  return "?";
}

namespace {

struct PairTerms {
  std::set<std::pair<int, int>> pairs;  // qubit pairs carrying XX + YY
};

PairTerms hopping_pairs(const PauliSum& h) {
  PairTerms out;
  const int n = h.num_qubits();
  for (const auto& [p, c] : h.terms()) {
    if (p.is_diagonal()) continue;
    const uint64_t x = p.x_mask();
    if (p.weight() != 2 || __builtin_popcountll(x) != 2 || (p.z_mask() != 0 && p.z_mask() != x)) {
      throw ModelError("term " + p.label() + " is not of the XX/YY pair form");
    }
    const int a = __builtin_ctzll(x);
    const int b = 63 - __builtin_clzll(x);
    PauliString xx(n), yy(n);
    xx.set(a, 'X');
    xx.set(b, 'X');
    yy.set(a, 'Y');
    yy.set(b, 'Y');
    if (std::abs(h.coefficient(xx) - h.coefficient(yy)) > 1e-12) {
      throw ModelError("XX and YY coefficients differ on a pair");
    }
    out.pairs.insert({a, b});
  }
  return out;
}

}  // namespace

std::vector<MeasurementGroup> group_terms(const PauliSum& h, MeasurementScheme scheme, int layers) {
  const int n = h.num_qubits();
  std::vector<MeasurementGroup> groups;
  if (scheme == MeasurementScheme::kTermwise) {
    for (const auto& [p, c] : h.terms()) {
      if (p.is_identity()) continue;
      MeasurementGroup g;
      g.kind = MeasurementGroup::Kind::kTermBasis;
      g.basis_term = p;
      g.number_preserving = p.is_diagonal();
      g.observables.push_back({PauliSum(p, 1.0), p.x_mask() | p.z_mask()});
      groups.push_back(std::move(g));
    }
    return groups;
  }

  MeasurementGroup comp;
  comp.kind = MeasurementGroup::Kind::kComputational;
  for (const auto& [p, c] : h.terms()) {
    if (!p.is_identity() && p.is_diagonal()) comp.observables.push_back({PauliSum(p, 1.0), p.z_mask()});
  }
  if (!comp.observables.empty()) groups.push_back(std::move(comp));

  const PairTerms hp = hopping_pairs(h);
  std::set<std::pair<int, int>> done;
  const auto settings = ladder_measurement_settings(n, layers);
  for (size_t s = 0; s < settings.size(); ++s) {
    MeasurementGroup g;
    g.kind = MeasurementGroup::Kind::kPairRotated;
    g.setting = static_cast<int>(s);
    for (const auto& [a, b] : settings[s].pairs) {
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      if (!hp.pairs.count(key) || done.count(key)) continue;
      done.insert(key);
      g.pairs.push_back({a, b});
      g.observables.push_back({d_plus(n, a, b), uint64_t{1} << a});
      if (scheme == MeasurementScheme::kXXplusYY) {
        g.observables.push_back({d_minus(n, a, b), uint64_t{1} << b});
      }
    }
    if (!g.pairs.empty()) groups.push_back(std::move(g));
  }
  if (done.size() != hp.pairs.size()) throw ModelError("measurement settings do not cover every pair");
  if (scheme == MeasurementScheme::kXXYYIZZI && groups.empty()) {
    throw ModelError("no measurable terms");
  }
  return groups;
}

std::vector<PauliSum> xxyy_izzi_operators(const PauliSum& h) {
  const int n = h.num_qubits();
  std::vector<PauliSum> ops;
  std::set<uint64_t> single_z;
  for (const auto& [p, c] : h.terms()) {
    if (p.is_identity() || !p.is_diagonal()) continue;
    if (p.weight() > 2) throw ModelError("diagonal term of weight > 2: " + p.label());
    ops.emplace_back(p, 1.0);
    if (p.weight() == 1) single_z.insert(p.z_mask());
  }
  for (const auto& [a, b] : hopping_pairs(h).pairs) {
    // D+ needs both Z_a and Z_b to recover XX + YY.
    for (int q : {a, b}) {
      if (!single_z.count(uint64_t{1} << q)) {
        ops.emplace_back(PauliString::single(n, q, 'Z'), 1.0);
        single_z.insert(uint64_t{1} << q);
      }
    }
    ops.push_back(d_plus(n, a, b));
  }
  return ops;
}

}  // namespace pairvqe
