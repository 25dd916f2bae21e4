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

#include "pairvqe/mitigation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>

namespace pairvqe {

namespace {

const cplx kI(0, 1);

double wrap_phase(double phi) {
  phi = std::remainder(phi, 2 * std::numbers::pi);
  return phi <= -std::numbers::pi ? phi + 2 * std::numbers::pi : phi;
}

}  // namespace

Method parse_method(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "raw") return Method::kRaw;
  if (s == "ps") return Method::kPS;
  if (s == "ev") return Method::kEV;
  if (s == "vd") return Method::kVD;
  if (s == "ps-vd" || s == "psvd" || s == "ps_vd") return Method::kPSVD;
  throw MitigationError("unknown mitigation method '" + std::string(name) + "'");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kRaw:
      return "raw";
    case Method::kPS:
      return "PS";
    case Method::kEV:
      return "EV";
    case Method::kVD:
      return "VD";
    case Method::kPSVD:
      return "PS-VD";
  }
  return "?";
}

Symmetry Symmetry::number(int width, int weight) {
  return {Kind::kNumber, width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1, weight};
}

Symmetry Symmetry::parity(uint64_t mask, int parity) { return {Kind::kParity, mask, parity & 1}; }

bool Symmetry::accepts(uint64_t bits) const {
  switch (kind) {
    case Kind::kNone:
      return true;
    case Kind::kNumber:
      return __builtin_popcountll(bits & mask) == value;
    case Kind::kParity:
      return (__builtin_popcountll(bits & mask) & 1) == value;
  }
  return true;
}

double Histogram::total() const {
  double t = 0;
  for (const auto& [b, w] : entries) t += w;
  return t;
}

Histogram Histogram::from_record(const MeasurementRecord& record) {
  Histogram h;
  h.width = record.width;
  for (const auto& [b, c] : record.counts) h.entries.emplace_back(b, static_cast<double>(c));
  h.shots = static_cast<double>(record.total());
  return h;
}

Histogram Histogram::from_distribution(std::span<const double> dist, int width, double cutoff) {
  Histogram h;
  h.width = width;
  for (size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > cutoff) h.entries.emplace_back(i, dist[i]);
  }
  return h;
}

PostselectResult postselect(const MeasurementRecord& record, const Symmetry& symmetry) {
  PostselectResult out;
  out.record.circuit_id = record.circuit_id;
  out.record.width = record.width;
  out.record.metadata = record.metadata;
  uint64_t kept = 0;
  for (const auto& [b, c] : record.counts) {
    if (symmetry.accepts(b)) {
      out.record.counts[b] = c;
      kept += c;
    }
  }
  const uint64_t total = record.total();
  out.keep_fraction = total ? static_cast<double>(kept) / static_cast<double>(total) : 0.0;
  out.empty = kept == 0;
  return out;
}

Histogram postselect(const Histogram& h, const Symmetry& symmetry, double* keep_fraction) {
  Histogram out;
  out.width = h.width;
  double kept = 0;
  for (const auto& [b, w] : h.entries) {
    if (symmetry.accepts(b)) {
      out.entries.emplace_back(b, w);
      kept += w;
    }
  }
  const double total = h.total();
  const double frac = total > 0 ? kept / total : 0.0;
  out.shots = h.shots * frac;
  if (keep_fraction) *keep_fraction = frac;
  return out;
}

MitigatedEstimate parity_expectation(const Histogram& h, uint64_t mask) {
  const double total = h.total();
  if (total <= 0) throw MitigationError("empty histogram");
  double s = 0;
  for (const auto& [b, w] : h.entries) s += w * z_parity(b, mask);
  MitigatedEstimate e;
  e.value = s / total;
  e.variance = h.shots > 0 ? (1 - e.value * e.value) / h.shots : 0.0;
  return e;
}

double reflection_covariance(const Histogram& h, uint64_t mask_i, uint64_t mask_j) {
  if (h.shots <= 0) return 0;
  const double total = h.total();
  double si = 0, sj = 0, sij = 0;
  for (const auto& [b, w] : h.entries) {
    const int pi = z_parity(b, mask_i), pj = z_parity(b, mask_j);
    si += w * pi;
    sj += w * pj;
    sij += w * pi * pj;
  }
  return (sij / total - (si / total) * (sj / total)) / h.shots;
}

// ---------------------------------------------------------------------------

EvFit fit_ev(std::span<const EvReadout> readouts, double reference_sign, double field_multiplier) {
  struct Signal {
    double x_plus = 0, x_minus = 0, y_plus = 0, y_minus = 0;
    int nxp = 0, nxm = 0, nyp = 0, nym = 0;
  };
  std::map<double, Signal> by_alpha;
  for (const EvReadout& r : readouts) {
    const double total = r.total();
    if (total <= 0) throw MitigationError("echo readout without shots");
    const double v = (r.m_plus - r.m_minus) / total;
    Signal& s = by_alpha[r.alpha];
    switch (r.basis) {
      case TomographyBasis::kPlusX:
        s.x_plus += v, ++s.nxp;
        break;
      case TomographyBasis::kMinusX:
        s.x_minus += v, ++s.nxm;
        break;
      case TomographyBasis::kPlusY:
        s.y_plus += v, ++s.nyp;
        break;
      case TomographyBasis::kMinusY:
        s.y_minus += v, ++s.nym;
        break;
    }
  }
  if (by_alpha.size() < 3) throw MitigationError("echo fit needs at least three distinct alpha values");
  const Eigen::Index m = static_cast<Eigen::Index>(by_alpha.size());
  Eigen::MatrixXcd a(m, 2);
  Eigen::MatrixXd a_real(m, 2);
  Eigen::VectorXcd y(m);
  std::vector<double> alphas;
  Eigen::Index row = 0;
  for (const auto& [alpha, s] : by_alpha) {
    auto avg = [](double plus, int np, double minus, int nm) {
      if (np && nm) return (plus / np - minus / nm) / 2;
      if (np) return plus / np;
      if (nm) return -minus / nm;
      throw MitigationError("echo readout missing a tomography basis");
    };
    const double x = avg(s.x_plus, s.nxp, s.x_minus, s.nxm);
    const double yy = avg(s.y_plus, s.nyp, s.y_minus, s.nym);
    const cplx sig = 0.5 * cplx(x, yy);
    const cplx ref(std::cos(alpha), std::sin(alpha) * reference_sign);
    if (std::abs(ref) < 1e-12) throw MitigationError("reference phase vanishes at this alpha");
    y(row) = 2.0 * sig / std::conj(ref);
    a(row, 0) = std::cos(alpha);
    a(row, 1) = kI * std::sin(alpha);
    a_real(row, 0) = std::cos(alpha);
    a_real(row, 1) = std::sin(alpha);
    alphas.push_back(alpha);
    ++row;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a_real);
  const auto sv = svd.singularValues();
  if (sv(1) <= 0 || sv(0) / sv(1) > 1e8) throw MitigationError("degenerate echo fit");
  const Eigen::VectorXcd uv = a.colPivHouseholderQr().solve(y);
  const cplx u = uv(0), v = uv(1);
  if (std::abs(u) < 1e-14) throw MitigationError("fitted fidelity is not positive");
  double f = std::abs(u), theta = std::arg(u), o = (v * std::conj(u)).real() / std::norm(u);

  // Gauss-Newton refinement on (F, Theta, <O>).
  for (int it = 0; it < 30; ++it) {
    Eigen::MatrixXd jac(2 * m, 3);
    Eigen::VectorXd res(2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double c = std::cos(alphas[static_cast<size_t>(k)]), s = std::sin(alphas[static_cast<size_t>(k)]);
      const cplx ph = std::exp(kI * theta);
      const cplx base(c, s * o);
      const cplx model = f * ph * base;
      const cplx r = y(k) - model;
      const cplx d_f = ph * base, d_theta = kI * model, d_o = f * ph * kI * s;
      res(2 * k) = r.real();
      res(2 * k + 1) = r.imag();
      jac.row(2 * k) << d_f.real(), d_theta.real(), d_o.real();
      jac.row(2 * k + 1) << d_f.imag(), d_theta.imag(), d_o.imag();
    }
    const Eigen::Vector3d step = jac.colPivHouseholderQr().solve(res);
    f += step(0);
    theta += step(1);
    o += step(2);
    if (step.norm() < 1e-15) break;
  }
  if (!(f > 0)) throw MitigationError("fitted fidelity is not positive");
  double resid = 0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double c = std::cos(alphas[static_cast<size_t>(k)]), s = std::sin(alphas[static_cast<size_t>(k)]);
    resid += std::norm(y(k) - f * std::exp(kI * theta) * cplx(c, s * o));
  }
  EvFit fit;
  fit.value = o;
  fit.fidelity = f;
  fit.phase = wrap_phase(theta);
  fit.field = field_multiplier != 0 ? fit.phase / field_multiplier : std::numeric_limits<double>::quiet_NaN();
  fit.residual = std::sqrt(resid);
  return fit;
}

MitigatedEstimate ev_estimate(std::span<const EvReadout> readouts, double reference_sign, double field_multiplier,
                              Rng* rng, int resamples) {
  const EvFit fit = fit_ev(readouts, reference_sign, field_multiplier);
  MitigatedEstimate e;
  e.method = Method::kEV;
  e.value = fit.value;
  e.fidelity = fit.fidelity;
  e.field = fit.field;
  const bool counted = std::all_of(readouts.begin(), readouts.end(), [](const EvReadout& r) { return r.total() > 1; });
  if (rng == nullptr || !counted || resamples < 2) return e;
  std::vector<double> values;
  std::vector<EvReadout> boot(readouts.begin(), readouts.end());
  for (int b = 0; b < resamples; ++b) {
    for (size_t k = 0; k < boot.size(); ++k) {
      const EvReadout& r = readouts[k];
      const auto total = static_cast<uint64_t>(std::llround(r.total()));
      std::binomial_distribution<uint64_t> first(total, r.m_plus / r.total());
      const uint64_t mp = first(*rng);
      const double rest = r.m_minus + r.m_zero;
      uint64_t mm = 0;
      if (rest > 0 && total > mp) {
        std::binomial_distribution<uint64_t> second(total - mp, r.m_minus / rest);
        mm = second(*rng);
      }
      boot[k].m_plus = static_cast<double>(mp);
      boot[k].m_minus = static_cast<double>(mm);
      boot[k].m_zero = static_cast<double>(total - mp - mm);
    }
    try {
      values.push_back(fit_ev(boot, reference_sign, field_multiplier).value);
    } catch (const MitigationError&) {
      // A degenerate resample carries no information about the spread.
    }
  }
  if (values.size() >= 2) {
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    e.variance = var / static_cast<double>(values.size() - 1);
  }
  return e;
}

double ev_field_multiplier(const EvCircuit& ev) {
  const auto& layers = ev.circuit.layers();
  if (layers.empty()) return 0;
  uint64_t bits = 0;
  double total = 0;
  for (size_t l = 0; l + 1 < layers.size(); ++l) {
    bool is_virtual = true;
    for (const Gate& g : layers[l]) {
      if (!g.is_virtual()) is_virtual = false;
      if (l == 0 && g.kind == GateKind::kPhasedXZ && g.q0 == ev.measurement_qubit) {
        bits |= uint64_t{1} << g.q0;
      } else if (g.kind == GateKind::kCNOT && ((bits >> g.q0) & 1)) {
        bits ^= uint64_t{1} << g.q1;
      } else if (g.kind == GateKind::kSWAP) {
        const uint64_t b0 = (bits >> g.q0) & 1, b1 = (bits >> g.q1) & 1;
        if (b0 != b1) bits ^= (uint64_t{1} << g.q0) | (uint64_t{1} << g.q1);
      }
    }
    if (!is_virtual) total += __builtin_popcountll(bits);
  }
  return -2 * total;
}

double loschmidt_fidelity(const Histogram& h) {
  const double total = h.total();
  if (total <= 0) throw MitigationError("empty histogram");
  double zero = 0;
  for (const auto& [b, w] : h.entries) {
    if (b == 0) zero += w;
  }
  return zero / total;
}

double loschmidt_fidelity(const MeasurementRecord& record) { return loschmidt_fidelity(Histogram::from_record(record)); }

// ---------------------------------------------------------------------------

VdResult vd_estimate(const Histogram& h, const VdCircuit& vd, bool postselected) {
  const size_t k = vd.observables.size();
  std::vector<int> pair_of(k);
  for (size_t i = 0; i < k; ++i) {
    const uint64_t mask = vd.observables[i].logical_zmask;
    if (__builtin_popcountll(mask) != 1) throw MitigationError("VD observables must be single-bit parities");
    pair_of[i] = vd.position[static_cast<size_t>(__builtin_ctzll(mask))];
  }
  Symmetry sym;
  if (postselected) {
    sym = vd.symmetry == VdCircuit::Symmetry::kNumber ? Symmetry{Symmetry::Kind::kNumber, vd.postselect_mask, vd.postselect_value}
                                                      : Symmetry::parity(vd.postselect_mask, vd.postselect_value);
  }
  std::vector<double> sx(k, 0), sxx(k, 0);
  double sd = 0, kept = 0;
  const double total = h.total();
  const int n = vd.num_qubits;
  for (const auto& [b, w] : h.entries) {
    if (!sym.accepts(b)) continue;
    kept += w;
    int sign = 1;
    for (int m = 0; m < n; ++m) {
      const bool f1 = (b >> vd.first[static_cast<size_t>(m)]) & 1, f2 = (b >> vd.second[static_cast<size_t>(m)]) & 1;
      if (f1 && !f2) sign = -sign;
    }
    sd += w * sign;
    for (size_t i = 0; i < k; ++i) {
      const int m = pair_of[i];
      const double z1 = ((b >> vd.first[static_cast<size_t>(m)]) & 1) ? -1.0 : 1.0;
      const double z2 = ((b >> vd.second[static_cast<size_t>(m)]) & 1) ? -1.0 : 1.0;
      const double o = (z1 + z2) / 2;
      sx[i] += w * sign * o;
      sxx[i] += w * o * o;
    }
  }
  if (kept <= 0) throw MitigationError("no outcomes survive postselection");
  VdResult out;
  out.keep_fraction = total > 0 ? kept / total : 0.0;
  const double den = sd / kept;
  if (!(den > 0)) throw MitigationError("purity estimate is not positive");
  out.purity = den;
  const double shots = h.shots * out.keep_fraction;
  for (size_t i = 0; i < k; ++i) {
    const double num = sx[i] / kept;
    const double r = num / den;
    out.values.push_back(r);
    if (shots > 0) {
      // x = S o, d = S with S = +-1: E[x^2] = E[o^2], E[x d] = E[o].
      double eo = 0;
      for (const auto& [b, w] : h.entries) {
        if (!sym.accepts(b)) continue;
        const int m = pair_of[i];
        const double z1 = ((b >> vd.first[static_cast<size_t>(m)]) & 1) ? -1.0 : 1.0;
        const double z2 = ((b >> vd.second[static_cast<size_t>(m)]) & 1) ? -1.0 : 1.0;
        eo += w * (z1 + z2) / 2;
      }
      eo /= kept;
      const double var_x = sxx[i] / kept - num * num;
      const double cov = eo - num * den;
      const double var_d = 1 - den * den;
      out.variances.push_back(std::max(0.0, (var_x - 2 * r * cov + r * r * var_d) / (shots * den * den)));
    } else {
      out.variances.push_back(0.0);
    }
  }
  return out;
}

double clip_expectation(double value) { return std::clamp(value, -1.0, 1.0); }

std::vector<double> clip_expectations(std::vector<double> values) {
  for (double& v : values) v = clip_expectation(v);
  return values;
}

}  // namespace pairvqe
