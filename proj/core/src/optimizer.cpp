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

#include "pairvqe/optimizer.hpp"

#include <cmath>
#include <sstream>

#include "pairvqe/rng.hpp"
#include "pairvqe/simulator.hpp"

namespace pairvqe {

QuadraticModel fit_quadratic_model(std::span<const Eigen::VectorXd> points, std::span<const double> values,
                                   const Eigen::VectorXd& center) {
  const Eigen::Index d = center.size();
  if (points.size() != values.size()) throw OptimizerError("points and values differ in length");
  if (static_cast<Eigen::Index>(points.size()) < d + 2) {
    throw OptimizerError("quadratic fit needs at least " + std::to_string(d + 2) + " points");
  }
  const Eigen::Index nfeat = 1 + d + d * (d + 1) / 2;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(points.size()), nfeat);
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (size_t i = 0; i < points.size(); ++i) {
    const Eigen::VectorXd dx = points[i] - center;
    const auto r = static_cast<Eigen::Index>(i);
    design(r, 0) = 1;
    design.block(r, 1, 1, d) = dx.transpose();
    Eigen::Index col = 1 + d;
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = j; k < d; ++k) design(r, col++) = dx(j) * dx(k);
    }
    y(r) = values[i];
  }
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd coef = cod.solve(y);
  QuadraticModel m;
  m.c = coef(0);
  m.b = coef.segment(1, d);
  m.a = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index col = 1 + d;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j; k < d; ++k) {
      if (j == k) {
        m.a(j, j) = coef(col++);
      } else {
        m.a(j, k) = m.a(k, j) = coef(col++) / 2;
      }
    }
  }
  return m;
}

CmgdConfig default_hyperparameters(int num_parameters) {
  CmgdConfig c;
  c.x0 = Eigen::VectorXd::Zero(num_parameters);
  c.learning_rate = 0.15;
  c.sample_radius = 1.0;
  c.stability = 0;
  c.evaluations = static_cast<int>(std::lround(0.409 * (num_parameters + 1) * (num_parameters + 2)));
  c.radius_decay = 0;
  c.rate_decay = 0.2;
  c.max_iterations = 12;
  return c;
}

namespace {

Eigen::VectorXd sample_ball(const Eigen::VectorXd& center, double radius, Rng& rng) {
  std::normal_distribution<double> normal;
  const Eigen::Index d = center.size();
  Eigen::VectorXd dir(d);
  double norm = 0;
  while (norm < 1e-12) {
    for (Eigen::Index i = 0; i < d; ++i) dir(i) = normal(rng);
    norm = dir.norm();
  }
  const double r = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(d));
  return center + dir * (r / norm);
}

}  // namespace

CmgdResult cmgd_minimize(const Oracle& oracle, const CmgdConfig& config, uint64_t seed) {
  const Eigen::Index d = config.x0.size();
  if (d == 0) throw OptimizerError("empty parameter vector");
  if (!(config.learning_rate > 0 && config.sample_radius > 0)) {
    throw OptimizerError("learning rate and sample radius must be positive");
  }
  if (config.evaluations < 1) throw OptimizerError("evaluations per iteration must be positive");
  Rng rng = make_stream(seed, stable_hash("cmgd"));
  CmgdResult res;
  Eigen::VectorXd x = config.x0;
  std::vector<Eigen::VectorXd> hist_x;
  std::vector<double> hist_y;
  Eigen::VectorXd g_prev, h_prev;
  for (int m = 0; m < config.max_iterations; ++m) {
    CmgdIteration it;
    it.iteration = m;
    it.x = x;
    it.radius = config.sample_radius / std::pow(m + 1.0, config.radius_decay);
    std::vector<Eigen::VectorXd> batch;
    for (int k = 0; k < config.evaluations; ++k) batch.push_back(sample_ball(x, it.radius, rng));
    batch.push_back(x);
    std::vector<double> vals(batch.size());
    const uint64_t first_call = res.oracle_calls;
    parallel_blocks(batch.size(), config.workers, [&](size_t, size_t lo, size_t hi) {
      for (size_t i = lo; i < hi; ++i) vals[i] = oracle(batch[i], first_call + i);
    });
    res.oracle_calls += batch.size();
    for (size_t i = 0; i < batch.size(); ++i) {
      hist_x.push_back(batch[i]);
      hist_y.push_back(vals[i]);
    }
    it.value = vals.back();
    it.samples = vals;

    std::vector<Eigen::VectorXd> near_x;
    std::vector<double> near_y;
    for (size_t i = 0; i < hist_x.size(); ++i) {
      if ((hist_x[i] - x).norm() <= config.sample_radius + 1e-12) {
        near_x.push_back(hist_x[i]);
        near_y.push_back(hist_y[i]);
      }
    }
    const QuadraticModel model = fit_quadratic_model(near_x, near_y, x);
    it.gradient = model.b;
    if (it.gradient.norm() < config.tolerance) {
      it.direction = Eigen::VectorXd::Zero(d);
      res.trace.push_back(it);
      res.converged = true;
      break;
    }
    if (config.conjugate && m > 0 && g_prev.squaredNorm() > 0) {
      it.beta = it.gradient.squaredNorm() / g_prev.squaredNorm();
      it.direction = it.gradient + it.beta * h_prev;
    } else {
      it.beta = 0;
      it.direction = it.gradient;
    }
    if (config.line_search) {
      const double curv = it.direction.dot(2 * model.a * it.direction);
      if (!(curv > 0)) throw OptimizerError("line search needs positive curvature along the direction");
      it.step = it.gradient.dot(it.direction) / curv;
    } else {
      it.step = config.learning_rate / std::pow(m + 1.0 + config.stability, config.rate_decay);
    }
    x = x - it.step * it.direction;
    g_prev = it.gradient;
    h_prev = it.direction;
    res.trace.push_back(std::move(it));
  }
  res.x = x;
  return res;
}

CmgdResult mgd_minimize(const Oracle& oracle, CmgdConfig config, uint64_t seed) {
  config.conjugate = false;
  return cmgd_minimize(oracle, config, seed);
}

std::string trace_csv(const CmgdResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,energy,grad_norm,beta,gamma_eff,delta_eff\n";
  for (const auto& it : result.trace) {
    os << it.iteration << ',' << it.value << ',' << it.gradient.norm() << ',' << it.beta << ',' << it.step << ','
       << it.radius << '\n';
  }
  return os.str();
}

ReferenceResult reference_minimize(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                                   double gradient_tolerance, int max_iterations) {
  const Eigen::Index d = x0.size();
  auto grad = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(d);
    Eigen::VectorXd xp = x, xm = x;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
      xp(i) = x(i) + h;
      xm(i) = x(i) - h;
      g(i) = (f(xp) - f(xm)) / (2 * h);
      xp(i) = xm(i) = x(i);
    }
    return g;
  };
  ReferenceResult r;
  Eigen::VectorXd x = x0;
  double fx = f(x);
  Eigen::VectorXd g = grad(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(d, d);
  int it = 0, stalled = 0;
  for (; it < max_iterations && g.norm() >= gradient_tolerance && stalled < 3; ++it) {
    Eigen::VectorXd p = -hinv * g;
    if (p.dot(g) >= 0) {
      hinv.setIdentity();
      p = -g;
    }
    double t = 1;
    double fn = f(x + t * p);
    int back = 0;
    while (fn > fx + 1e-4 * t * g.dot(p) && back < 60) {
      t /= 2;
      fn = f(x + t * p);
      ++back;
    }
    if (back == 60) break;
    const Eigen::VectorXd s = t * p;
    stalled = fx - fn < 1e-13 * std::max(1.0, std::abs(fx)) ? stalled + 1 : 0;
    x += s;
    fx = fn;
    const Eigen::VectorXd gn = grad(x);
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      const double rho = 1 / sy;
      const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(d, d);
      hinv = (i - rho * s * y.transpose()) * hinv * (i - rho * y * s.transpose()) + rho * s * s.transpose();
    } else {
      hinv.setIdentity();
    }
    g = gn;
  }
  r.x = x;
  r.value = fx;
  r.gradient_norm = g.norm();
  r.iterations = it;
  return r;
}

}  // namespace pairvqe
