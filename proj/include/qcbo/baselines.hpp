#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qcbo/box.hpp"
#include "qcbo/rng.hpp"
#include "qcbo/simplex.hpp"
#include "qcbo/trace.hpp"

namespace qcbo {

using Objective = std::function<double(const std::vector<double>&)>;

struct SpsaConfig {
  double a = 0.0;      // 0: calibrate so the first step moves ~5% of the box
  double c = 0.1;      // perturbation scale in unit-box coordinates
  double big_a = -1;   // <0: use 10% of the step count
  double alpha = 0.602;
  double gamma = 0.101;
};

struct NmConfig {
  double simplex_edge = 0.05;  // fraction of box width
  bool restart_on_collapse = true;
};

struct DeConfig {
  int pop_factor = 15;  // population = pop_factor * dimension
  double f = 0.8;
  double cr = 0.9;
};

// Simultaneous-perturbation stochastic approximation; two objective
// evaluations per step, executed in unit-box coordinates.
inline OptimizationTrace spsa(const Objective& objective, const SpsaConfig& config,
                              const Box& bounds, int budget, std::uint64_t seed, Sense sense) {
  if (budget < 2) throw std::invalid_argument("spsa: budget must be >= 2");
  bounds.validate();
  Rng rng = make_stream(seed, 11);
  const std::size_t p = bounds.dim();
  Box unit = Box::cube(0.0, 1.0, p);
  TraceBuilder trace(sense, budget);

  auto h = [&](const std::vector<double>& u) {
    std::vector<double> x = bounds.from_unit(u);
    double y = objective(x);
    trace.record(x, y);
    return sense == Sense::minimize ? y : -y;
  };

  std::vector<double> theta = unit.sample(rng);
  int steps = budget / 2;
  double big_a = config.big_a >= 0 ? config.big_a : 0.1 * steps;
  double a = config.a;

  std::vector<double> delta(p), plus(p), minus(p);
  for (int k = 1; k <= steps; ++k) {
    double ck = config.c / std::pow(static_cast<double>(k), config.gamma);
    for (std::size_t i = 0; i < p; ++i) delta[i] = (rng() & 1) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < p; ++i) {
      plus[i] = theta[i] + ck * delta[i];
      minus[i] = theta[i] - ck * delta[i];
    }
    plus = unit.clamp(std::move(plus));
    minus = unit.clamp(std::move(minus));
    double yp = h(plus), ym = h(minus);
    double diff = (yp - ym) / (2.0 * ck);
    if (a == 0.0) {
      double gmag = std::abs(diff);
      double target = 0.05 * std::pow(1.0 + big_a, config.alpha);
      a = gmag > 1e-12 ? target / gmag : target;
    }
    double ak = a / std::pow(k + big_a, config.alpha);
    for (std::size_t i = 0; i < p; ++i) theta[i] -= ak * diff * delta[i];
    theta = unit.clamp(std::move(theta));
  }
  if (!trace.exhausted()) h(theta);  // odd budget: spend the last evaluation at the iterate
  return trace.take();
}

// Downhill simplex over the raw box; 5%-of-width initial edges. When the
// simplex collapses with budget left, it restarts around the incumbent so the
// evaluation budget is always consumed exactly.
inline OptimizationTrace nelder_mead(const Objective& objective, const NmConfig& config,
                                     const Box& bounds, int budget, std::uint64_t seed,
                                     Sense sense) {
  if (budget < 1) throw std::invalid_argument("nelder_mead: budget must be >= 1");
  bounds.validate();
  Rng rng = make_stream(seed, 12);
  const std::size_t p = bounds.dim();
  TraceBuilder trace(sense, budget);

  auto h = [&](const std::vector<double>& x) {
    double y = objective(x);
    trace.record(x, y);
    return sense == Sense::minimize ? y : -y;
  };

  std::vector<double> step(p);
  for (std::size_t i = 0; i < p; ++i) step[i] = config.simplex_edge * (bounds.hi[i] - bounds.lo[i]);

  std::vector<double> start = bounds.sample(rng);
  while (!trace.exhausted()) {
    SimplexOptions opts;
    opts.max_evals = trace.remaining();
    opts.xtol = 1e-12;
    opts.project = &bounds;
    SimplexResult res = simplex_minimize(h, start, step, opts);
    if (!config.restart_on_collapse) break;
    start = res.x;
  }
  return trace.take();
}

// Differential evolution, rand/1/bin.
inline OptimizationTrace differential_evolution(const Objective& objective, const DeConfig& config,
                                                const Box& bounds, int budget, std::uint64_t seed,
                                                Sense sense) {
  if (budget < 1) throw std::invalid_argument("de: budget must be >= 1");
  bounds.validate();
  Rng rng = make_stream(seed, 13);
  const std::size_t p = bounds.dim();
  const int pop = std::max(4, config.pop_factor * static_cast<int>(p));
  TraceBuilder trace(sense, budget);

  auto h = [&](const std::vector<double>& x) {
    double y = objective(x);
    trace.record(x, y);
    return sense == Sense::minimize ? y : -y;
  };

  std::vector<std::vector<double>> members;
  std::vector<double> values;
  for (int i = 0; i < pop && !trace.exhausted(); ++i) {
    members.push_back(bounds.sample(rng));
    values.push_back(h(members.back()));
  }

  std::vector<double> trial(p);
  while (!trace.exhausted()) {
    for (int i = 0; i < static_cast<int>(members.size()) && !trace.exhausted(); ++i) {
      int r1, r2, r3;
      do {
        r1 = uniform_int(rng, pop);
      } while (r1 == i);
      do {
        r2 = uniform_int(rng, pop);
      } while (r2 == i || r2 == r1);
      do {
        r3 = uniform_int(rng, pop);
      } while (r3 == i || r3 == r1 || r3 == r2);
      int jrand = uniform_int(rng, static_cast<int>(p));
      for (std::size_t j = 0; j < p; ++j) {
        if (static_cast<int>(j) == jrand || uniform01(rng) < config.cr)
          trial[j] = members[r1][j] + config.f * (members[r2][j] - members[r3][j]);
        else
          trial[j] = members[i][j];
      }
      trial = bounds.clamp(std::move(trial));
      double tv = h(trial);
      if (tv <= values[i]) {
        members[i] = trial;
        values[i] = tv;
      }
    }
  }
  return trace.take();
}

inline OptimizationTrace random_search(const Objective& objective, const Box& bounds, int budget,
                                       std::uint64_t seed, Sense sense) {
  if (budget < 1) throw std::invalid_argument("random_search: budget must be >= 1");
  bounds.validate();
  Rng rng = make_stream(seed, 14);
  TraceBuilder trace(sense, budget);
  while (!trace.exhausted()) {
    std::vector<double> x = bounds.sample(rng);
    trace.record(x, objective(x));
  }
  return trace.take();
}

}  // namespace qcbo
