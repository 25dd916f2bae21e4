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

#include "pairvqe/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pairvqe/rng.hpp"

namespace pairvqe {

using nlohmann::json;

namespace {

const std::map<std::string, ExperimentKind, std::less<>>& experiment_names() {
  static const std::map<std::string, ExperimentKind, std::less<>> names = {
      {"energy_sweep", ExperimentKind::kEnergySweep},
      {"scaling_study", ExperimentKind::kScalingStudy},
      {"optimization", ExperimentKind::kOptimization},
      {"pauli_error_histogram", ExperimentKind::kPauliErrorHistogram}};
  return names;
}

// Collects problems so that all of them are reported at once.
class Problems {
 public:
  void add(std::string msg) { items_.push_back(std::move(msg)); }
  void check(bool ok, std::string msg) {
    if (!ok) add(std::move(msg));
  }
  void raise() const {
    if (items_.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& m : items_) msg += "\n  - " + m;
    throw ConfigError(msg);
  }

 private:
  std::vector<std::string> items_;
};

void reject_unknown(const json& j, const std::string& where, std::initializer_list<std::string_view> keys,
                    Problems& p) {
  if (!j.is_object()) {
    p.add(where + " must be an object");
    return;
  }
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto key : keys) known = known || key == k;
    if (!known) p.add("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where, Problems& p) {
  if (!j.is_object() || !j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    p.add("bad value for '" + (where.empty() ? std::string(key) : where + "." + key) + "'");
  }
}

json noise_json(const NoiseSpec& n) {
  json j;
  if (!n.preset.empty()) j["preset"] = n.preset;
  j["p2"] = n.model.p2;
  j["p1"] = n.model.p1;
  j["amplitude_damping"] = n.model.amplitude_damping;
  j["dephasing"] = n.model.dephasing;
  j["field"] = n.model.field;
  j["readout_p01"] = n.model.readout_p01;
  j["readout_p10"] = n.model.readout_p10;
  j["global_survival"] = n.model.global_survival;
  return j;
}

NoiseSpec noise_from_json(const json& j, Problems& p) {
  NoiseSpec n;
  if (j.is_string()) {
    n.preset = j.get<std::string>();
  } else {
    reject_unknown(j, "noise",
                   {"preset", "p2", "p1", "amplitude_damping", "dephasing", "field", "readout_p01", "readout_p10",
                    "global_survival"},
                   p);
    read(j, "preset", n.preset, "noise", p);
  }
  if (!n.preset.empty()) {
    try {
      n.model = noise_preset(n.preset);
    } catch (const ConfigError& e) {
      p.add(e.what());
    }
  }
  if (j.is_object()) {
    read(j, "p2", n.model.p2, "noise", p);
    read(j, "p1", n.model.p1, "noise", p);
    read(j, "amplitude_damping", n.model.amplitude_damping, "noise", p);
    read(j, "dephasing", n.model.dephasing, "noise", p);
    read(j, "field", n.model.field, "noise", p);
    read(j, "readout_p01", n.model.readout_p01, "noise", p);
    read(j, "readout_p10", n.model.readout_p10, "noise", p);
    read(j, "global_survival", n.model.global_survival, "noise", p);
  }
  return n;
}

}  // namespace

bool NoiseSpec::operator==(const NoiseSpec& o) const {
  const NoiseModel& a = model;
  const NoiseModel& b = o.model;
  return preset == o.preset && a.p2 == b.p2 && a.p1 == b.p1 && a.amplitude_damping == b.amplitude_damping &&
         a.dephasing == b.dephasing && a.field == b.field && a.readout_p01 == b.readout_p01 &&
         a.readout_p10 == b.readout_p10 && a.global_survival == b.global_survival;
}

ExperimentKind parse_experiment(std::string_view name) {
  const auto& names = experiment_names();
  const auto it = names.find(name);
  if (it == names.end()) throw ConfigError("unknown experiment '" + std::string(name) + "'");
  return it->second;
}

std::string experiment_name(ExperimentKind kind) {
  for (const auto& [name, k] : experiment_names()) {
    if (k == kind) return name;
  }
  return "?";
}

NoiseModel noise_preset(std::string_view name) {
  NoiseModel m;
  if (name == "noiseless") return m;
  if (name == "paper_like") {
    m.p2 = 0.04;
    m.p1 = 0.004;
    m.dephasing = 0.004;
    m.readout_p01 = 0.01;
    m.readout_p10 = 0.02;
    return m;
  }
  throw ConfigError("unknown noise preset '" + std::string(name) + "'");
}

std::vector<std::string> noise_preset_names() { return {"noiseless", "paper_like"}; }

ExperimentConfig config_preset(std::string_view name) {
  ExperimentConfig c;
  int n = 0;
  if (name == "rg4") n = 4;
  if (name == "rg6") n = 6;
  if (name == "rg8") n = 8;
  if (name == "rg10") n = 10;
  if (n == 0) throw ConfigError("unknown preset '" + std::string(name) + "'");
  c.model.num_qubits = n;
  c.noise.preset = "paper_like";
  c.noise.model = noise_preset("paper_like");
  c.shots.per_circuit = 10000;
  // Distillation doubles the register; beyond 12 simulated qubits it is left out.
  c.methods = n <= 6 ? std::vector<Method>{Method::kRaw, Method::kPS, Method::kEV, Method::kVD, Method::kPSVD}
                     : std::vector<Method>{Method::kRaw, Method::kPS, Method::kEV};
  return c;
}

std::vector<std::string> config_preset_names() { return {"rg4", "rg6", "rg8", "rg10"}; }

void validate(const ExperimentConfig& c) {
  Problems p;
  const int n = c.model.num_qubits;
  p.check(c.model.kind == "rg" || c.model.kind == "chemistry", "model.kind must be rg or chemistry");
  p.check(n >= 2 && n % 2 == 0 && n <= 14, "model.num_qubits must be even and between 2 and 14");
  if (c.model.kind == "chemistry") {
    if (c.model.file.empty()) {
      p.add("model.file is required for chemistry");
    } else if (!std::ifstream(c.model.file)) {
      p.add("model.file '" + c.model.file + "' cannot be read");
    }
  } else {
    p.check(!c.g_values.empty(), "g_values must not be empty");
  }
  for (double g : c.g_values) p.check(std::isfinite(g), "g_values must be finite");
  p.check(c.layers == -1 || c.layers >= 1, "layers must be -1 or positive");
  const auto& src = c.parameters.source;
  p.check(src == "reference" || src == "file" || src == "zero", "parameters.source must be reference, file or zero");
  if (src == "file") {
    if (c.parameters.file.empty()) {
      p.add("parameters.file is required when parameters.source is file");
    } else if (c.parameters.file.find("{g}") == std::string::npos) {
      p.check(c.g_values.size() <= 1 || c.experiment == ExperimentKind::kScalingStudy,
              "parameters.file needs a {g} placeholder for several couplings");
      p.check(static_cast<bool>(std::ifstream(c.parameters.file)),
              "parameters.file '" + c.parameters.file + "' cannot be read");
    }
    p.check(c.experiment != ExperimentKind::kScalingStudy, "scaling_study needs parameters.source reference or zero");
  }
  try {
    c.noise.model.validate();
  } catch (const std::exception& e) {
    p.add(std::string("noise: ") + e.what());
  }
  p.check(!c.methods.empty(), "methods must not be empty");
  p.check(c.shots.target_variance > 0, "shots.target_variance must be positive");
  try {
    parse_simulation_mode(c.simulation.mode);
  } catch (const std::exception& e) {
    p.add(std::string("simulation.mode: ") + e.what());
  }
  p.check(c.simulation.trajectories >= 1, "simulation.trajectories must be positive");
  p.check(c.workers >= 1, "workers must be positive");
  if (c.experiment == ExperimentKind::kScalingStudy) {
    p.check(c.model.kind == "rg", "scaling_study needs the rg model");
    p.check(c.scaling_qubits.size() >= 2, "scaling.num_qubits needs at least two sizes");
    for (int q : c.scaling_qubits) p.check(q >= 2 && q % 2 == 0 && q <= 14, "scaling.num_qubits must be even, 2..14");
  }
  if (c.experiment == ExperimentKind::kOptimization) {
    const auto& o = c.optimizer;
    p.check(o.algorithm == "cmgd" || o.algorithm == "mgd", "optimizer.algorithm must be cmgd or mgd");
    try {
      parse_method(o.cost_method);
    } catch (const std::exception& e) {
      p.add(std::string("optimizer.cost_method: ") + e.what());
    }
    p.check(o.perturbation >= 0, "optimizer.perturbation must be non-negative");
    p.check(o.max_iterations >= 1, "optimizer.max_iterations must be positive");
    p.check(o.learning_rate > 0 && o.sample_radius > 0, "optimizer learning_rate and sample_radius must be positive");
    p.check(o.evaluations >= 0, "optimizer.evaluations must be non-negative");
    p.check(c.g_values.size() <= 1, "optimization runs at a single coupling");
  }
  if (c.experiment == ExperimentKind::kPauliErrorHistogram) {
    p.check(c.histogram.bins >= 1, "histogram.bins must be positive");
    p.check(c.histogram.max_error > 0, "histogram.max_error must be positive");
  }
  p.raise();
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = experiment_name(c.experiment);
  j["model"] = {{"kind", c.model.kind}, {"num_qubits", c.model.num_qubits}, {"file", c.model.file}};
  j["g_values"] = c.g_values;
  j["layers"] = c.layers;
  j["parameters"] = {{"source", c.parameters.source}, {"file", c.parameters.file}};
  j["noise"] = noise_json(c.noise);
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["scheme"] = scheme_name(c.scheme);
  j["shots"] = {{"per_circuit", c.shots.per_circuit}, {"target_variance", c.shots.target_variance}};
  j["simulation"] = {{"mode", c.simulation.mode}, {"trajectories", c.simulation.trajectories}};
  j["scaling"] = {{"num_qubits", c.scaling_qubits}};
  const auto& o = c.optimizer;
  j["optimizer"] = {{"algorithm", o.algorithm},         {"cost_method", o.cost_method},
                    {"perturbation", o.perturbation},   {"max_iterations", o.max_iterations},
                    {"learning_rate", o.learning_rate}, {"sample_radius", o.sample_radius},
                    {"evaluations", o.evaluations},     {"rate_decay", o.rate_decay},
                    {"stability", o.stability},         {"radius_decay", o.radius_decay}};
  j["histogram"] = {{"bins", c.histogram.bins}, {"max_error", c.histogram.max_error}};
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  Problems p;
  ExperimentConfig c;
  reject_unknown(j, "",
                 {"experiment", "model", "g_values", "layers", "parameters", "noise", "methods", "scheme", "shots",
                  "simulation", "scaling", "optimizer", "histogram", "seed", "workers"},
                 p);
  if (!j.is_object()) p.raise();
  if (j.contains("experiment")) {
    try {
      c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    } catch (const std::exception& e) {
      p.add(std::string("experiment: ") + e.what());
    }
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown(m, "model", {"kind", "num_qubits", "file"}, p);
    read(m, "kind", c.model.kind, "model", p);
    read(m, "num_qubits", c.model.num_qubits, "model", p);
    read(m, "file", c.model.file, "model", p);
  }
  read(j, "g_values", c.g_values, "", p);
  read(j, "layers", c.layers, "", p);
  if (j.contains("parameters")) {
    const json& m = j.at("parameters");
    reject_unknown(m, "parameters", {"source", "file"}, p);
    read(m, "source", c.parameters.source, "parameters", p);
    read(m, "file", c.parameters.file, "parameters", p);
  }
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"), p);
  if (j.contains("methods")) {
    c.methods.clear();
    try {
      for (const auto& name : j.at("methods").get<std::vector<std::string>>()) c.methods.push_back(parse_method(name));
    } catch (const std::exception& e) {
      p.add(std::string("methods: ") + e.what());
    }
  }
  if (j.contains("scheme")) {
    try {
      c.scheme = parse_scheme(j.at("scheme").get<std::string>());
    } catch (const std::exception& e) {
      p.add(std::string("scheme: ") + e.what());
    }
  }
  if (j.contains("shots")) {
    const json& m = j.at("shots");
    reject_unknown(m, "shots", {"per_circuit", "target_variance"}, p);
    read(m, "per_circuit", c.shots.per_circuit, "shots", p);
    read(m, "target_variance", c.shots.target_variance, "shots", p);
  }
  if (j.contains("simulation")) {
    const json& m = j.at("simulation");
    reject_unknown(m, "simulation", {"mode", "trajectories"}, p);
    read(m, "mode", c.simulation.mode, "simulation", p);
    read(m, "trajectories", c.simulation.trajectories, "simulation", p);
  }
  if (j.contains("scaling")) {
    const json& m = j.at("scaling");
    reject_unknown(m, "scaling", {"num_qubits"}, p);
    read(m, "num_qubits", c.scaling_qubits, "scaling", p);
  }
  if (j.contains("optimizer")) {
    const json& m = j.at("optimizer");
    auto& o = c.optimizer;
    reject_unknown(m, "optimizer",
                   {"algorithm", "cost_method", "perturbation", "max_iterations", "learning_rate", "sample_radius",
                    "evaluations", "rate_decay", "stability", "radius_decay"},
                   p);
    read(m, "algorithm", o.algorithm, "optimizer", p);
    read(m, "cost_method", o.cost_method, "optimizer", p);
    read(m, "perturbation", o.perturbation, "optimizer", p);
    read(m, "max_iterations", o.max_iterations, "optimizer", p);
    read(m, "learning_rate", o.learning_rate, "optimizer", p);
    read(m, "sample_radius", o.sample_radius, "optimizer", p);
    read(m, "evaluations", o.evaluations, "optimizer", p);
    read(m, "rate_decay", o.rate_decay, "optimizer", p);
    read(m, "stability", o.stability, "optimizer", p);
    read(m, "radius_decay", o.radius_decay, "optimizer", p);
  }
  if (j.contains("histogram")) {
    const json& m = j.at("histogram");
    reject_unknown(m, "histogram", {"bins", "max_error"}, p);
    read(m, "bins", c.histogram.bins, "histogram", p);
    read(m, "max_error", c.histogram.max_error, "histogram", p);
  }
  read(j, "seed", c.seed, "", p);
  read(j, "workers", c.workers, "", p);
  p.raise();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
  return fmt::format("{:016x}", stable_hash(to_json(config).dump()));
}

SimulationOptions simulation_options(const ExperimentConfig& config, uint64_t seed) {
  SimulationOptions s;
  s.mode = parse_simulation_mode(config.simulation.mode);
  s.trajectories = config.simulation.trajectories;
  s.workers = config.workers;
  s.seed = seed;
  return s;
}

CmgdConfig cmgd_config(const OptimizerSpec& spec, int num_parameters) {
  CmgdConfig c = default_hyperparameters(num_parameters);
  c.learning_rate = spec.learning_rate;
  c.sample_radius = spec.sample_radius;
  c.max_iterations = spec.max_iterations;
  if (spec.evaluations > 0) c.evaluations = spec.evaluations;
  c.rate_decay = spec.rate_decay;
  c.stability = spec.stability;
  c.radius_decay = spec.radius_decay;
  c.conjugate = spec.algorithm == "cmgd";
  return c;
}

std::vector<double> read_parameters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read parameter file '" + path + "'");
  std::vector<double> theta;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream is(line);
    double v = 0;
    std::string rest;
    if (!(is >> v) || (is >> rest) || !std::isfinite(v)) {
      throw ConfigError(fmt::format("{}:{}: expected one number per line", path, lineno));
    }
    theta.push_back(v);
  }
  return theta;
}

void write_parameters(const std::string& path, const std::vector<double>& theta) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write parameter file '" + path + "'");
  for (double v : theta) out << fmt::format("{}\n", v);
}

}  // namespace pairvqe
