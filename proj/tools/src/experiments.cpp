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

#include "pairvqe/experiments.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "pairvqe/circuits.hpp"
#include "pairvqe/estimation.hpp"
#include "pairvqe/optimizer.hpp"
#include "pairvqe/pipeline.hpp"
#include "pairvqe/rng.hpp"

namespace pairvqe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

uint64_t derived_seed(const ExperimentConfig& c, const std::string& key) {
  return stable_hash(fmt::format("{}/{}", c.seed, key));
}

EstimationSettings settings_for(const ExperimentConfig& c, int layers, uint64_t seed) {
  EstimationSettings s;
  s.scheme = c.scheme;
  s.layers = layers;
  s.shots = c.shots.per_circuit;
  s.sim = simulation_options(c, seed);
  return s;
}

int layers_for(const ExperimentConfig& c, int n) { return c.layers < 0 ? default_layers(n) : c.layers; }

std::vector<double> coupling_list(const ExperimentConfig& c) {
  if (c.model.kind == "chemistry") return {kNaN};
  return c.g_values;
}

// Exact <Z_q> of the noiseless ansatz state per logical qubit.
std::vector<double> exact_z(int n, int layers, const std::vector<double>& theta) {
  const StateVector psi = ansatz_state(n, layers, theta);
  const auto pos = ansatz_output_positions(n, layers);
  std::vector<double> z;
  for (int q = 0; q < n; ++q) {
    z.push_back(expectation(PauliSum(PauliString::single(n, q, 'Z'), 1.0).permuted(pos), psi.amplitudes()));
  }
  return z;
}

double exact_operator(const PauliSum& op, int layers, const StateVector& psi) {
  return expectation(op.permuted(ansatz_output_positions(op.num_qubits(), layers)), psi.amplitudes());
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string version_string() { return PAIRVQE_VERSION; }

std::string Table::to_csv(const ExperimentConfig& config) const {
  std::string out;
  out += "# version: " + version_string() + "\n";
  out += fmt::format("# seed: {}\n", config.seed);
  out += "# config_hash: " + config_hash(config) + "\n";
  for (size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

size_t Table::column(const std::string& col) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == col) return i;
  }
  throw ConfigError("table " + name + " has no column " + col);
}

PauliSum experiment_hamiltonian(const ExperimentConfig& config, int num_qubits, double g) {
  if (config.model.kind == "chemistry") {
    std::ifstream in(config.model.file);
    if (!in) throw ConfigError("cannot read model file '" + config.model.file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const SeniorityZeroSpec spec = SeniorityZeroSpec::parse(ss.str());
    if (spec.num_orbitals != num_qubits) {
      throw ConfigError(fmt::format("model file has {} orbitals but num_qubits is {}", spec.num_orbitals, num_qubits));
    }
    return chem_hamiltonian(spec);
  }
  return rg_hamiltonian(num_qubits, g);
}

std::vector<double> reference_parameters(const PauliSum& h, int layers) {
  const int p = num_parameters(h.num_qubits(), layers);
  const auto f = [&](const Eigen::VectorXd& x) {
    return exact_energy(h, layers, std::span<const double>(x.data(), static_cast<size_t>(x.size())));
  };
  const ReferenceResult r = reference_minimize(f, Eigen::VectorXd::Zero(p), 1e-7, 5000);
  return {r.x.data(), r.x.data() + r.x.size()};
}

std::vector<double> experiment_parameters(const ExperimentConfig& config, const PauliSum& h, int layers, double g) {
  const int p = num_parameters(h.num_qubits(), layers);
  const auto& src = config.parameters.source;
  if (src == "zero") return std::vector<double>(static_cast<size_t>(p), 0.0);
  if (src == "file") {
    std::string path = config.parameters.file;
    const auto at = path.find("{g}");
    if (at != std::string::npos) path.replace(at, 3, format_number(g));
    std::vector<double> theta = read_parameters(path);
    if (static_cast<int>(theta.size()) != p) {
      throw ConfigError(fmt::format("parameter file '{}' has {} values, the ansatz needs {}", path, theta.size(), p));
    }
    return theta;
  }
  return reference_parameters(h, layers);
}

Table run_energy_sweep(const ExperimentConfig& c) {
  validate(c);
  Table t;
  t.name = "energy_sweep";
  t.columns = {"g",     "method",      "energy",      "energy_std", "delta", "delta_std", "doci_energy",
               "noiseless_upccd_energy", "keep_fraction", "fidelity"};
  const int n = c.model.num_qubits, layers = layers_for(c, n);
  const auto gs = coupling_list(c);
  for (size_t gi = 0; gi < gs.size(); ++gi) {
    const double g = gs[gi];
    const PauliSum h = experiment_hamiltonian(c, n, g);
    const double doci = doci_solve(h, n / 2).energy;
    const auto theta = experiment_parameters(c, h, layers, g);
    const double noiseless = exact_energy(h, layers, theta);
    for (Method m : c.methods) {
      const EstimationSettings s = settings_for(c, layers, derived_seed(c, fmt::format("sweep:{}:{}", gi, method_name(m))));
      const EnergyEstimate e = estimate_energy(h, theta, m, c.noise.model, s);
      const DeltaEstimate d = estimate_delta(e);
      t.rows.push_back({format_number(g), method_name(m), format_number(e.energy), format_number(std::sqrt(e.variance)),
                        format_number(d.value), format_number(std::sqrt(d.variance)), format_number(doci),
                        format_number(noiseless), format_number(e.keep_fraction), format_number(e.fidelity)});
    }
  }
  return t;
}

std::vector<Table> run_scaling_study(const ExperimentConfig& c) {
  validate(c);
  Table t;
  t.name = "scaling_study";
  t.columns = {"num_qubits", "method", "energy_error", "delta_error", "fidelity", "keep_fraction",
               "circuits",   "shots",  "wall_clock"};
  struct Series {
    std::vector<double> n, shots, clock, error;
  };
  std::vector<Series> series(c.methods.size());
  for (int n : c.scaling_qubits) {
    const int layers = layers_for(c, n);
    std::vector<std::vector<double>> err(c.methods.size()), derr(c.methods.size()), fid(c.methods.size()),
        keep(c.methods.size()), shots(c.methods.size());
    const auto gs = coupling_list(c);
    for (size_t gi = 0; gi < gs.size(); ++gi) {
      const PauliSum h = experiment_hamiltonian(c, n, gs[gi]);
      const auto theta = experiment_parameters(c, h, layers, gs[gi]);
      const double e0 = exact_energy(h, layers, theta);
      const double d0 = order_parameter(occupations_from_z(exact_z(n, layers, theta)));
      EstimationSettings base = settings_for(c, layers, 0);
      const auto sig = group_standard_deviations(h, theta, NoiseModel{}, base);
      const double lagrangian = lagrangian_allocation(sig, std::vector<double>(sig.size(), 1.0), c.shots.target_variance).total;
      for (size_t mi = 0; mi < c.methods.size(); ++mi) {
        const Method m = c.methods[mi];
        const EstimationSettings s =
            settings_for(c, layers, derived_seed(c, fmt::format("scaling:{}:{}:{}", n, gi, method_name(m))));
        const EnergyEstimate e = estimate_energy(h, theta, m, c.noise.model, s);
        err[mi].push_back(std::abs(e.energy - e0));
        derr[mi].push_back(std::abs(estimate_delta(e).value - d0));
        fid[mi].push_back(std::isnan(e.fidelity) ? 1.0 : e.fidelity);
        keep[mi].push_back(e.keep_fraction);
        // Measured variance scales as 1/shots; without shots fall back to the noiseless plan.
        const bool measured = m != Method::kRaw && e.shots > 0 && e.variance > 0;
        shots[mi].push_back(measured ? e.variance * e.shots / c.shots.target_variance : lagrangian);
      }
    }
    for (size_t mi = 0; mi < c.methods.size(); ++mi) {
      const Method m = c.methods[mi];
      const int circuits = circuit_count(m, n, HamiltonianKind::kRichardsonGaudin);
      const double total = mean(shots[mi]);
      const double clock = wall_clock(1, circuits, total);
      t.rows.push_back({std::to_string(n), method_name(m), format_number(mean(err[mi])), format_number(mean(derr[mi])),
                        format_number(mean(fid[mi])), format_number(mean(keep[mi])), std::to_string(circuits),
                        format_number(total), format_number(clock)});
      series[mi].n.push_back(n);
      series[mi].shots.push_back(total);
      series[mi].clock.push_back(clock);
      series[mi].error.push_back(mean(err[mi]));
    }
  }
  Table fits;
  fits.name = "scaling_fits";
  fits.columns = {"method", "quantity", "exponent", "prefactor", "r_squared"};
  for (size_t mi = 0; mi < c.methods.size(); ++mi) {
    const std::pair<const char*, const std::vector<double>*> qs[] = {
        {"shots", &series[mi].shots}, {"wall_clock", &series[mi].clock}, {"energy_error", &series[mi].error}};
    for (const auto& [name, ys] : qs) {
      bool positive = true;
      for (double y : *ys) positive = positive && y > 0;
      if (!positive) continue;
      const PowerLawFit f = fit_power_law(series[mi].n, *ys);
      fits.rows.push_back({method_name(c.methods[mi]), name, format_number(f.exponent), format_number(f.prefactor),
                           format_number(f.r_squared)});
    }
  }
  return {t, fits};
}

std::vector<Table> run_optimization(const ExperimentConfig& c) {
  validate(c);
  const int n = c.model.num_qubits, layers = layers_for(c, n);
  const double g = coupling_list(c).front();
  const PauliSum h = experiment_hamiltonian(c, n, g);
  const auto ref = experiment_parameters(c, h, layers, g);
  const int p = static_cast<int>(ref.size());
  CmgdConfig cfg = cmgd_config(c.optimizer, p);
  cfg.workers = c.workers;
  std::mt19937_64 gen(derived_seed(c, "perturbation"));
  std::uniform_real_distribution<double> u(-c.optimizer.perturbation, c.optimizer.perturbation);
  cfg.x0 = Eigen::VectorXd(p);
  for (int i = 0; i < p; ++i) cfg.x0(i) = ref[static_cast<size_t>(i)] + u(gen);
  const Method cost = parse_method(c.optimizer.cost_method);
  ExperimentConfig inner = c;
  inner.workers = 1;  // the batch is already spread over the workers
  const Oracle oracle = [&](const Eigen::VectorXd& x, uint64_t call) {
    const EstimationSettings s = settings_for(inner, layers, derived_seed(c, fmt::format("oracle:{}", call)));
    return estimate_energy(h, std::span<const double>(x.data(), static_cast<size_t>(x.size())), cost, c.noise.model, s)
        .energy;
  };
  const CmgdResult r = cmgd_minimize(oracle, cfg, derived_seed(c, "optimizer"));

  Table trace;
  trace.name = "optimization_trace";
  trace.columns = {"iteration", "energy", "grad_norm", "beta", "gamma_eff", "delta_eff"};
  for (const auto& it : r.trace) {
    trace.rows.push_back({std::to_string(it.iteration), format_number(it.value), format_number(it.gradient.norm()),
                          format_number(it.beta), format_number(it.step), format_number(it.radius)});
  }
  const std::vector<double> xf(r.x.data(), r.x.data() + r.x.size());
  const std::vector<double> x0(cfg.x0.data(), cfg.x0.data() + cfg.x0.size());
  const EnergyEstimate ev =
      estimate_energy(h, xf, Method::kEV, c.noise.model, settings_for(c, layers, derived_seed(c, "final")));
  Table summary;
  summary.name = "optimization_summary";
  summary.columns = {"g",           "reference_energy", "doci_energy",   "start_energy",    "final_energy",
                     "final_ev_energy", "final_ev_std", "iterations", "oracle_calls"};
  summary.rows.push_back({format_number(g), format_number(exact_energy(h, layers, ref)),
                          format_number(doci_solve(h, n / 2).energy), format_number(exact_energy(h, layers, x0)),
                          format_number(exact_energy(h, layers, xf)), format_number(ev.energy),
                          format_number(std::sqrt(ev.variance)), std::to_string(r.trace.size()),
                          std::to_string(r.oracle_calls)});
  return {trace, summary};
}

std::vector<Table> run_pauli_error_histogram(const ExperimentConfig& c) {
  validate(c);
  const int n = c.model.num_qubits, layers = layers_for(c, n);
  const int bins = c.histogram.bins;
  const double width = c.histogram.max_error / bins;
  std::vector<std::vector<uint64_t>> counts(c.methods.size(), std::vector<uint64_t>(static_cast<size_t>(bins), 0));
  std::vector<std::vector<double>> errors(c.methods.size());
  const auto gs = coupling_list(c);
  for (size_t gi = 0; gi < gs.size(); ++gi) {
    const PauliSum h = experiment_hamiltonian(c, n, gs[gi]);
    const auto theta = experiment_parameters(c, h, layers, gs[gi]);
    const StateVector psi = ansatz_state(n, layers, theta);
    for (size_t mi = 0; mi < c.methods.size(); ++mi) {
      const Method m = c.methods[mi];
      const EstimationSettings s = settings_for(c, layers, derived_seed(c, fmt::format("pauli:{}:{}", gi, method_name(m))));
      const EnergyEstimate e = estimate_energy(h, theta, m, c.noise.model, s);
      for (const auto& o : e.operators) {
        const double err = std::abs(o.value - exact_operator(o.op, layers, psi));
        errors[mi].push_back(err);
        const auto b = std::min<size_t>(static_cast<size_t>(bins - 1), static_cast<size_t>(err / width));
        ++counts[mi][b];
      }
    }
  }
  Table hist;
  hist.name = "pauli_errors";
  hist.columns = {"method", "bin_low", "bin_high", "count"};
  Table summary;
  summary.name = "pauli_error_summary";
  summary.columns = {"method", "operators", "mean_error", "max_error"};
  for (size_t mi = 0; mi < c.methods.size(); ++mi) {
    for (int b = 0; b < bins; ++b) {
      // The last bin also holds everything above max_error.
      const double hi = b + 1 == bins ? std::numeric_limits<double>::infinity() : (b + 1) * width;
      hist.rows.push_back({method_name(c.methods[mi]), format_number(b * width), format_number(hi),
                           std::to_string(counts[mi][static_cast<size_t>(b)])});
    }
    double mx = 0;
    for (double e : errors[mi]) mx = std::max(mx, e);
    summary.rows.push_back({method_name(c.methods[mi]), std::to_string(errors[mi].size()),
                            format_number(mean(errors[mi])), format_number(mx)});
  }
  return {hist, summary};
}

std::vector<Table> run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::kEnergySweep:
      return {run_energy_sweep(config)};
    case ExperimentKind::kScalingStudy:
      return run_scaling_study(config);
    case ExperimentKind::kOptimization:
      return run_optimization(config);
    case ExperimentKind::kPauliErrorHistogram:
      return run_pauli_error_histogram(config);
  }
  throw ConfigError("unknown experiment");
}

void write_outputs(const std::string& directory, const ExperimentConfig& config, const std::vector<Table>& tables) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw ConfigError("cannot create output directory '" + directory + "': " + ec.message());
  for (const Table& t : tables) {
    std::ofstream out(fs::path(directory) / (t.name + ".csv"), std::ios::binary);
    if (!out) throw ConfigError("cannot write to '" + directory + "'");
    out << t.to_csv(config);
  }
  std::ofstream cfg(fs::path(directory) / "config.json", std::ios::binary);
  cfg << to_json(config).dump(2) << "\n";
}

}  // namespace pairvqe
