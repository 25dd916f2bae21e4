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

#ifndef PAIRVQE_MITIGATION_HPP_
#define PAIRVQE_MITIGATION_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pairvqe/circuits.hpp"
#include "pairvqe/rng.hpp"
#include "pairvqe/simulator.hpp"

namespace pairvqe {

class MitigationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { kRaw, kPS, kEV, kVD, kPSVD };

Method parse_method(std::string_view name);
std::string method_name(Method method);

/// Conservation law checked on measured bitstrings.
struct Symmetry {
  enum class Kind { kNone, kNumber, kParity };
  Kind kind = Kind::kNone;
  uint64_t mask = 0;  // bits that take part
  int value = 0;      // Hamming weight, or parity 0/1

  static Symmetry number(int width, int weight);
  static Symmetry parity(uint64_t mask, int parity);
  bool accepts(uint64_t bits) const;
};

/// Weighted outcomes: sampled counts (shots = total count) or exact probabilities (shots = 0).
struct Histogram {
  int width = 0;
  std::vector<std::pair<uint64_t, double>> entries;
  double shots = 0;

  double total() const;
  static Histogram from_record(const MeasurementRecord& record);
  /// Exact distribution; entries below cutoff are dropped.
  static Histogram from_distribution(std::span<const double> dist, int width, double cutoff = 0);
};

struct PostselectResult {
  MeasurementRecord record;
  double keep_fraction = 0;
  bool empty = true;
};

PostselectResult postselect(const MeasurementRecord& record, const Symmetry& symmetry);
/// Keeps accepted entries and rescales shots by the keep fraction.
Histogram postselect(const Histogram& h, const Symmetry& symmetry, double* keep_fraction = nullptr);

struct MitigatedEstimate {
  double value = 0;
  double variance = 0;
  Method method = Method::kRaw;
  double fidelity = std::numeric_limits<double>::quiet_NaN();
  double keep_fraction = 1;
  double field = std::numeric_limits<double>::quiet_NaN();
};

/// Mean of (-1)^{|b & mask|} and the variance of that mean (zero for exact histograms).
MitigatedEstimate parity_expectation(const Histogram& h, uint64_t mask);
/// Covariance of two parity means estimated from the same shots.
double reflection_covariance(const Histogram& h, uint64_t mask_i, uint64_t mask_j);

// ---------------------------------------------------------------------------
// Echo verification.

/// Counts on the measurement qubit for one (alpha, basis) circuit: M+ and M- read 0 and 1
/// with every other bit 0; M0 counts everything else. Probabilities work as counts of one shot.
struct EvReadout {
  double alpha = 0;
  TomographyBasis basis = TomographyBasis::kPlusX;
  double m_plus = 0;
  double m_minus = 0;
  double m_zero = 0;
  double total() const { return m_plus + m_minus + m_zero; }
};

struct EvFit {
  double value = 0;     // <O>
  double fidelity = 0;  // F
  double phase = 0;     // Theta, the accumulated relative phase
  double field = 0;     // h = wrap(Theta) / field_multiplier
  double residual = 0;
};

/// Fits y(alpha) = 2 s(alpha) / conj(cos a + i sin a o_phi) = F e^{i Theta} (cos a + i sin a <O>),
/// with s = (<X P0> + i <Y P0>)/2 from sign-averaged +-X and +-Y readouts.
EvFit fit_ev(std::span<const EvReadout> readouts, double reference_sign, double field_multiplier);

/// EV estimate of <O>. With a generator and finite counts the variance comes from a
/// multinomial bootstrap of the readouts.
MitigatedEstimate ev_estimate(std::span<const EvReadout> readouts, double reference_sign, double field_multiplier,
                              Rng* rng = nullptr, int resamples = 100);

/// Relative phase per unit field, -2 sum over noisy layers (all but the last) of the
/// Hamming weight of the |HF> branch.
double ev_field_multiplier(const EvCircuit& ev);

/// Probability of the all-zeros return bitstring.
double loschmidt_fidelity(const Histogram& h);
double loschmidt_fidelity(const MeasurementRecord& record);

// ---------------------------------------------------------------------------
// Virtual distillation.

struct VdResult {
  std::vector<double> values;     // Tr[rho^2 O] / Tr[rho^2], one per observable
  std::vector<double> variances;  // delta-method variances of the ratios
  double purity = 0;              // Tr[rho^2] estimate, after postselection weighting
  double keep_fraction = 1;
};

/// Estimates every observable of the VD circuit from outcomes on its 2n qubits.
VdResult vd_estimate(const Histogram& h, const VdCircuit& vd, bool postselected);

double clip_expectation(double value);
std::vector<double> clip_expectations(std::vector<double> values);

}  // namespace pairvqe

#endif  // PAIRVQE_MITIGATION_HPP_
