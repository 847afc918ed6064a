#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qcbo/acquisition.hpp"
#include "qcbo/box.hpp"
#include "qcbo/gp.hpp"
#include "qcbo/rng.hpp"
#include "qcbo/trace.hpp"

namespace qcbo {

struct BoConfig {
  int n_init = 10;
  int m_iters = 50;
  int refit_every = 10;
  Box bounds;
  AcquisitionSpec acquisition;
  std::uint64_t seed = 0;
  HyperBounds hyper_bounds;
  int fit_restarts = 5;
  int fit_evals = 60;
  AcqMaxOptions acq_max;

  void validate() const {
    if (n_init < 1 || m_iters < 0 || refit_every < 1)
      throw std::invalid_argument("bo config: bad budgets");
    bounds.validate();
    acquisition.validate();
  }
};

// Linear UCB schedule over the optimization iterations (1-based).
inline double k_schedule(int iter, int m_iters, double k_start, double k_end) {
  if (iter < 1 || iter > m_iters) throw std::domain_error("k_schedule: iteration out of range");
  if (m_iters == 1) return k_start;
  return k_start + (k_end - k_start) * static_cast<double>(iter - 1) /
                       static_cast<double>(m_iters - 1);
}

inline double k_schedule(int iter, const BoConfig& config) {
  return k_schedule(iter, config.m_iters, config.acquisition.ucb_k_start,
                    config.acquisition.ucb_k_end);
}

using Objective = std::function<double(const std::vector<double>&)>;

// Surrogate-guided optimization: n_init random evaluations, then m_iters
// rounds of acquisition maximization. The surrogate always maximizes; a
// minimization sense negates the objective internally. The model lives in
// unit-cube coordinates.
inline OptimizationTrace run_bo(const Objective& objective, const BoConfig& config, Sense sense) {
  config.validate();
  Rng rng_init = make_stream(config.seed, 1);
  Rng rng_acq = make_stream(config.seed, 2);
  Rng rng_fit = make_stream(config.seed, 3);

  const std::size_t p = config.bounds.dim();
  Box unit = Box::cube(0.0, 1.0, p);
  TraceBuilder trace(sense, config.n_init + config.m_iters);

  GpModel model({1.0, 0.25}, {1e-6}, true);
  double best_g = -std::numeric_limits<double>::infinity();
  double worst_g = std::numeric_limits<double>::infinity();
  auto to_internal = [&](double y) { return sense == Sense::maximize ? y : -y; };

  auto evaluate = [&](const std::vector<double>& theta_unit) {
    std::vector<double> theta = config.bounds.from_unit(theta_unit);
    double y = objective(theta);
    double g = to_internal(y);
    if (!std::isfinite(g)) {
      // non-finite observation: worst seen so far minus three prior sd
      double anchor = std::isfinite(worst_g) ? worst_g : 0.0;
      g = anchor - 3.0 * std::sqrt(model.kernel().variance);
      y = sense == Sense::maximize ? g : -g;
    }
    worst_g = std::min(worst_g, g);
    best_g = std::max(best_g, g);
    model.add_observation(theta_unit, g);
    trace.record(theta, y);
  };

  for (int i = 0; i < config.n_init; ++i) evaluate(unit.sample(rng_init));

  for (int iter = 1; iter <= config.m_iters; ++iter) {
    if ((iter - 1) % config.refit_every == 0 && model.data().size() >= 2) {
      FitResult fit =
          fit_hyperparameters(model.data(), model.kernel(), model.noise(), config.hyper_bounds,
                              rng_fit, true, config.fit_restarts, config.fit_evals);
      model.set_hyperparameters(fit.kernel, fit.noise);
    }
    double k_now = config.acquisition.kind == AcquisitionSpec::Kind::ucb
                       ? k_schedule(iter, config)
                       : 0.0;
    std::vector<double> theta_unit = maximize_acquisition(model, config.acquisition, k_now,
                                                          best_g, unit, rng_acq, config.acq_max);
    evaluate(theta_unit);
  }
  return trace.take();
}

}  // namespace qcbo
