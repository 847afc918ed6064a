#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qcbo/rng.hpp"
#include "qcbo/simplex.hpp"

namespace qcbo {

struct KernelParams {
  double variance = 1.0;     // sigma_0^2
  double lengthscale = 1.0;  // l

  void validate() const {
    if (!(variance > 0) || !std::isfinite(variance) || !(lengthscale > 0) ||
        !std::isfinite(lengthscale))
      throw std::invalid_argument("kernel params must be positive finite");
  }
};

struct NoiseParams {
  double noise_variance = 0.0;  // sigma_N^2

  void validate() const {
    if (!(noise_variance >= 0) || !std::isfinite(noise_variance))
      throw std::invalid_argument("noise variance must be non-negative finite");
  }
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
  double sd() const { return std::sqrt(std::max(0.0, variance)); }
};

// k(x) = sigma_0^2 (1 + x/l + x^2/(3 l^2)) exp(-x/l)
inline double matern52(double distance, const KernelParams& p) {
  if (!(distance >= 0) || !std::isfinite(distance))
    throw std::domain_error("matern52: distance must be finite and non-negative");
  p.validate();
  double r = distance / p.lengthscale;
  return p.variance * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

// Same kernel with the scaled distance precomputed; no validation (hot path).
inline double matern52_scaled(double r, double variance) {
  return variance * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

struct Dataset {
  Eigen::MatrixXd inputs;  // D x P, one row per observation
  Eigen::VectorXd outputs;

  Eigen::Index size() const { return outputs.size(); }
  Eigen::Index dim() const { return inputs.cols(); }

  static Dataset from(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("dataset: input/output count mismatch");
    Dataset d;
    if (xs.empty()) return d;
    d.inputs.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(xs[0].size()));
    d.outputs.resize(static_cast<Eigen::Index>(ys.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i].size() != xs[0].size())
        throw std::invalid_argument("dataset: inconsistent input dimension");
      for (std::size_t j = 0; j < xs[i].size(); ++j)
        d.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = xs[i][j];
      d.outputs[static_cast<Eigen::Index>(i)] = ys[i];
    }
    return d;
  }

  void add(const std::vector<double>& x, double y) {
    Eigen::Index d = inputs.rows() == 0 ? static_cast<Eigen::Index>(x.size()) : inputs.cols();
    if (static_cast<Eigen::Index>(x.size()) != d)
      throw std::invalid_argument("dataset: inconsistent input dimension");
    inputs.conservativeResize(inputs.rows() + 1, d);
    for (Eigen::Index j = 0; j < d; ++j) inputs(inputs.rows() - 1, j) = x[j];
    outputs.conservativeResize(outputs.size() + 1);
    outputs[outputs.size() - 1] = y;
  }
};

inline Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& pts) {
  Eigen::Index n = pts.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      double v = (pts.row(i) - pts.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

inline Eigen::MatrixXd gram(const Eigen::MatrixXd& pts, const KernelParams& kernel,
                            double jitter) {
  if (pts.rows() == 0) throw std::invalid_argument("gram: empty point set");
  kernel.validate();
  Eigen::MatrixXd K = pairwise_distances(pts);
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    for (Eigen::Index j = 0; j < K.cols(); ++j)
      K(i, j) = matern52_scaled(K(i, j) / kernel.lengthscale, kernel.variance);
  K.diagonal().array() += jitter;
  return K;
}

inline Eigen::MatrixXd gram(const std::vector<std::vector<double>>& pts,
                            const KernelParams& kernel, double jitter) {
  std::vector<double> ys(pts.size(), 0.0);
  return gram(Dataset::from(pts, ys).inputs, kernel, jitter);
}

// Regression model with a cached Cholesky factor of K + sigma_N^2 I.
// Mean function is zero; optionally the data mean is subtracted before
// fitting and added back at prediction (center_mean).
class GpModel {
 public:
  static constexpr double kJitterBase = 1e-8;
  static constexpr double kJitterMax = 1e-2;

  explicit GpModel(KernelParams kernel = {}, NoiseParams noise = {}, bool center_mean = true)
      : kernel_(kernel), noise_(noise), center_(center_mean) {
    kernel_.validate();
    noise_.validate();
  }

  const KernelParams& kernel() const { return kernel_; }
  const NoiseParams& noise() const { return noise_; }
  const Dataset& data() const { return data_; }
  bool centers_mean() const { return center_; }
  double offset() const { return offset_; }
  double jitter() const { return jitter_; }

  void set_data(Dataset d) {
    data_ = std::move(d);
    refactor();
  }

  void set_hyperparameters(const KernelParams& k, const NoiseParams& n) {
    k.validate();
    n.validate();
    kernel_ = k;
    noise_ = n;
    refactor();
  }

  // Appends one observation, extending the Cholesky factor by one row.
  void add_observation(const std::vector<double>& x, double y) {
    data_.add(x, y);
    Eigen::Index d = data_.size();
    if (d == 1) {
      refactor();
      return;
    }
    Eigen::VectorXd k(d - 1);
    for (Eigen::Index i = 0; i < d - 1; ++i)
      k[i] = matern52_scaled((data_.inputs.row(i) - data_.inputs.row(d - 1)).norm() /
                                 kernel_.lengthscale,
                             kernel_.variance);
    Eigen::VectorXd l = chol_.triangularView<Eigen::Lower>().solve(k);
    double rad = kernel_.variance + noise_.noise_variance + jitter_ - l.squaredNorm();
    if (!(rad > 0) || !std::isfinite(rad)) {
      refactor();  // escalate jitter from scratch
      return;
    }
    chol_.conservativeResize(d, d);
    chol_.row(d - 1).head(d - 1) = l.transpose();
    chol_.col(d - 1).head(d - 1).setZero();
    chol_(d - 1, d - 1) = std::sqrt(rad);
    recompute_alpha();
  }

  Prediction predict(const std::vector<double>& query) const {
    if (data_.size() == 0) return {0.0, kernel_.variance};
    if (static_cast<Eigen::Index>(query.size()) != data_.dim())
      throw std::invalid_argument("predict: query dimension mismatch");
    Eigen::VectorXd k = cross_covariances(query);
    Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
    double mean = offset_ + k.dot(alpha_);
    double var = std::max(0.0, kernel_.variance - v.squaredNorm());
    return {mean, var};
  }

  // queries: Q x P, one row per query point.
  void predict_batch(const Eigen::MatrixXd& queries, Eigen::VectorXd& mean,
                     Eigen::VectorXd& variance) const {
    Eigen::Index q = queries.rows();
    mean.resize(q);
    variance.resize(q);
    if (data_.size() == 0) {
      mean.setZero();
      variance.setConstant(kernel_.variance);
      return;
    }
    Eigen::Index d = data_.size();
    Eigen::MatrixXd ks(d, q);
    for (Eigen::Index j = 0; j < q; ++j)
      for (Eigen::Index i = 0; i < d; ++i)
        ks(i, j) = matern52_scaled(
            (data_.inputs.row(i) - queries.row(j)).norm() / kernel_.lengthscale,
            kernel_.variance);
    mean = ks.transpose() * alpha_;
    mean.array() += offset_;
    chol_.triangularView<Eigen::Lower>().solveInPlace(ks);
    for (Eigen::Index j = 0; j < q; ++j)
      variance[j] = std::max(0.0, kernel_.variance - ks.col(j).squaredNorm());
  }

  // -1/2 r^T (K+sN^2 I)^-1 r - 1/2 log det(K+sN^2 I) - D/2 log 2pi,
  // with r the (possibly centered) outputs.
  double log_marginal_likelihood() const {
    Eigen::Index d = data_.size();
    if (d == 0) throw std::invalid_argument("log_marginal_likelihood: empty dataset");
    Eigen::VectorXd r = data_.outputs.array() - offset_;
    double quad = r.dot(alpha_);
    double logdet = 2.0 * chol_.diagonal().array().log().sum();
    constexpr double log2pi = 1.8378770664093454835606594728112;
    return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(d) * log2pi;
  }

 private:
  Eigen::VectorXd cross_covariances(const std::vector<double>& query) const {
    Eigen::Index d = data_.size();
    Eigen::Map<const Eigen::RowVectorXd> q(query.data(),
                                           static_cast<Eigen::Index>(query.size()));
    Eigen::VectorXd k(d);
    for (Eigen::Index i = 0; i < d; ++i)
      k[i] = matern52_scaled((data_.inputs.row(i) - q).norm() / kernel_.lengthscale,
                             kernel_.variance);
    return k;
  }

  void recompute_alpha() {
    offset_ = center_ && data_.size() > 0 ? data_.outputs.mean() : 0.0;
    Eigen::VectorXd r = data_.outputs.array() - offset_;
    alpha_ = chol_.triangularView<Eigen::Lower>().solve(r);
    chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
  }

  void refactor() {
    if (data_.size() == 0) {
      chol_.resize(0, 0);
      alpha_.resize(0);
      offset_ = 0.0;
      jitter_ = kJitterBase * kernel_.variance;
      return;
    }
    Eigen::MatrixXd dist = pairwise_distances(data_.inputs);
    for (double scale = kJitterBase; scale <= kJitterMax * 1.0001; scale *= 10.0) {
      jitter_ = scale * kernel_.variance;
      Eigen::MatrixXd K(dist.rows(), dist.cols());
      for (Eigen::Index i = 0; i < dist.rows(); ++i)
        for (Eigen::Index j = 0; j < dist.cols(); ++j)
          K(i, j) = matern52_scaled(dist(i, j) / kernel_.lengthscale, kernel_.variance);
      K.diagonal().array() += noise_.noise_variance + jitter_;
      Eigen::LLT<Eigen::MatrixXd> llt(K);
      if (llt.info() == Eigen::Success) {
        chol_ = llt.matrixL();
        recompute_alpha();
        return;
      }
    }
    throw std::runtime_error("gp: covariance not positive definite after jitter escalation");
  }

  KernelParams kernel_;
  NoiseParams noise_;
  Dataset data_;
  bool center_;
  double offset_ = 0.0;
  double jitter_ = 0.0;
  Eigen::MatrixXd chol_;   // lower triangular
  Eigen::VectorXd alpha_;  // (K + sN^2 I)^-1 (y - offset)
};

struct HyperBounds {
  double lengthscale_lo = 1e-3, lengthscale_hi = 10.0;
  double variance_lo = 1e-4, variance_hi = 1e4;      // multiples of var(y)
  double noise_lo = 1e-8, noise_hi = 1.0;            // multiples of var(y)

  // Concrete box in units of the data variance (floored for constant data).
  Box concrete(double var_y) const {
    double v = std::max(var_y, 1e-12);
    return Box({variance_lo * v, lengthscale_lo, noise_lo * v},
               {variance_hi * v, lengthscale_hi, noise_hi * v});
  }
};

struct FitResult {
  KernelParams kernel;
  NoiseParams noise;
  double lml = -std::numeric_limits<double>::infinity();
  bool fallback = false;  // set when every restart failed numerically
};

// Multi-start simplex ascent of the log marginal likelihood over
// log-transformed (variance, lengthscale, noise_variance).
inline FitResult fit_hyperparameters(const Dataset& data, KernelParams init_kernel,
                                     NoiseParams init_noise, const HyperBounds& bounds, Rng& rng,
                                     bool center_mean = true, int restarts = 5,
                                     int evals_per_restart = 60) {
  if (data.size() < 2) throw std::invalid_argument("fit: need at least two observations");
  double var_y = 0.0;
  {
    double m = data.outputs.mean();
    var_y = (data.outputs.array() - m).square().sum() / data.outputs.size();
  }
  Box box = bounds.concrete(var_y);
  Box log_box({std::log(box.lo[0]), std::log(box.lo[1]), std::log(box.lo[2])},
              {std::log(box.hi[0]), std::log(box.hi[1]), std::log(box.hi[2])});

  Eigen::MatrixXd dist = pairwise_distances(data.inputs);
  double offset = center_mean ? data.outputs.mean() : 0.0;
  Eigen::VectorXd r = data.outputs.array() - offset;
  Eigen::Index d = data.size();
  constexpr double log2pi = 1.8378770664093454835606594728112;

  auto neg_lml = [&](const std::vector<double>& logp) -> double {
    double s0 = std::exp(logp[0]), l = std::exp(logp[1]), sn = std::exp(logp[2]);
    Eigen::MatrixXd K(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        double v = matern52_scaled(dist(i, j) / l, s0);
        K(i, j) = v;
        K(j, i) = v;
      }
    K.diagonal().array() += sn + GpModel::kJitterBase * s0;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::VectorXd a = L.triangularView<Eigen::Lower>().solve(r);
    double lml = -0.5 * a.squaredNorm() - L.diagonal().array().log().sum() -
                 0.5 * static_cast<double>(d) * log2pi;
    return std::isfinite(lml) ? -lml : std::numeric_limits<double>::infinity();
  };

  init_kernel.validate();
  init_noise.validate();
  std::vector<double> init_log = log_box.clamp({std::log(init_kernel.variance),
                                                std::log(init_kernel.lengthscale),
                                                std::log(std::max(init_noise.noise_variance,
                                                                  box.lo[2]))});
  double init_val = neg_lml(init_log);

  std::vector<double> best = init_log;
  double best_val = init_val;
  bool any_ok = std::isfinite(init_val);
  SimplexOptions opts;
  opts.max_evals = evals_per_restart;
  opts.xtol = 1e-10;
  opts.project = &log_box;
  std::vector<double> step(3, 0.5);
  for (int s = 0; s < restarts; ++s) {
    std::vector<double> start = s == 0 ? init_log : log_box.sample(rng);
    SimplexResult res = simplex_minimize(neg_lml, start, step, opts);
    if (std::isfinite(res.f)) {
      any_ok = true;
      if (res.f < best_val) {
        best_val = res.f;
        best = res.x;
      }
    }
  }

  FitResult out;
  if (!any_ok) {
    out.kernel = init_kernel;
    out.noise = init_noise;
    out.fallback = true;
    return out;
  }
  out.kernel = {std::exp(best[0]), std::exp(best[1])};
  out.noise = {std::exp(best[2])};
  out.lml = -best_val;
  return out;
}

}  // namespace qcbo
