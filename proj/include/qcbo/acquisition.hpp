#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qcbo/box.hpp"
#include "qcbo/gp.hpp"
#include "qcbo/rng.hpp"
#include "qcbo/simplex.hpp"

namespace qcbo {

struct AcquisitionSpec {
  enum class Kind { ucb, ei };
  Kind kind = Kind::ucb;
  double ucb_k_start = 5.0;
  double ucb_k_end = 0.0;

  void validate() const {
    if (kind == Kind::ucb && !(ucb_k_start >= ucb_k_end && ucb_k_end >= 0))
      throw std::invalid_argument("acquisition: need k_start >= k_end >= 0");
  }
};

inline double ucb(const Prediction& pred, double k) { return pred.mean + k * pred.sd(); }

inline double norm_pdf(double z) {
  return 0.3989422804014326779399460599344 * std::exp(-0.5 * z * z);
}
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440084436210485); }

// E[max(0, f - y_best)] under the predictive normal.
inline double expected_improvement(const Prediction& pred, double y_best) {
  double sigma = pred.sd();
  double d = pred.mean - y_best;
  if (sigma <= 0.0) return std::max(0.0, d);
  double z = d / sigma;
  double ei = d * norm_cdf(z) + sigma * norm_pdf(z);
  return std::max(0.0, ei);
}

inline double acquisition_value(const AcquisitionSpec& spec, const Prediction& pred, double k_now,
                                double y_best) {
  return spec.kind == AcquisitionSpec::Kind::ucb ? ucb(pred, k_now)
                                                 : expected_improvement(pred, y_best);
}

struct AcqMaxOptions {
  int probes = 1024;
  int refine_top = 8;
  int refine_evals = 60;
};

// Random multi-probe of the box followed by simplex polish of the best probes.
// The returned point's acquisition value is >= every probe's.
inline std::vector<double> maximize_acquisition(const GpModel& model, const AcquisitionSpec& spec,
                                                double k_now, double y_best, const Box& bounds,
                                                Rng& rng, const AcqMaxOptions& opts = {}) {
  spec.validate();
  const std::size_t p = bounds.dim();
  Eigen::MatrixXd probes(opts.probes, static_cast<Eigen::Index>(p));
  for (int i = 0; i < opts.probes; ++i) {
    auto x = bounds.sample(rng);
    for (std::size_t j = 0; j < p; ++j) probes(i, static_cast<Eigen::Index>(j)) = x[j];
  }
  Eigen::VectorXd mu, var;
  model.predict_batch(probes, mu, var);
  std::vector<double> val(static_cast<std::size_t>(opts.probes));
  for (int i = 0; i < opts.probes; ++i)
    val[static_cast<std::size_t>(i)] =
        acquisition_value(spec, {mu[i], var[i]}, k_now, y_best);

  std::vector<int> order(static_cast<std::size_t>(opts.probes));
  std::iota(order.begin(), order.end(), 0);
  int top = std::min(opts.refine_top, opts.probes);
  std::partial_sort(order.begin(), order.begin() + top, order.end(),
                    [&](int a, int b) { return val[a] > val[b]; });

  std::vector<double> best(p);
  for (std::size_t j = 0; j < p; ++j) best[j] = probes(order[0], static_cast<Eigen::Index>(j));
  double best_val = val[static_cast<std::size_t>(order[0])];

  auto neg_acq = [&](const std::vector<double>& x) {
    return -acquisition_value(spec, model.predict(x), k_now, y_best);
  };
  SimplexOptions sopts;
  sopts.max_evals = opts.refine_evals;
  sopts.xtol = 1e-10;
  sopts.project = &bounds;
  std::vector<double> step(p);
  for (std::size_t j = 0; j < p; ++j) step[j] = 0.05 * (bounds.hi[j] - bounds.lo[j]);
  for (int t = 0; t < top; ++t) {
    std::vector<double> x0(p);
    for (std::size_t j = 0; j < p; ++j) x0[j] = probes(order[t], static_cast<Eigen::Index>(j));
    SimplexResult res = simplex_minimize(neg_acq, x0, step, sopts);
    if (-res.f > best_val) {
      best_val = -res.f;
      best = res.x;
    }
  }
  return bounds.clamp(best);
}

}  // namespace qcbo
