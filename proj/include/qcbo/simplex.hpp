#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "qcbo/box.hpp"

namespace qcbo {

struct SimplexOptions {
  int max_evals = 200;
  double xtol = 1e-12;          // stop when simplex diameter falls below this
  double ftol = 0.0;            // stop when value spread falls below this (0 = off)
  const Box* project = nullptr; // clamp candidate points into this box if set
};

struct SimplexResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  int evals = 0;
  bool collapsed = false;  // diameter dropped below xtol
};

// Nelder-Mead downhill simplex with the standard 1/2/0.5/0.5 coefficients.
// Evaluates at most opts.max_evals times; deterministic.
inline SimplexResult simplex_minimize(const std::function<double(const std::vector<double>&)>& f,
                                      const std::vector<double>& x0,
                                      const std::vector<double>& step,
                                      const SimplexOptions& opts = {}) {
  const std::size_t n = x0.size();
  SimplexResult res;
  res.x = x0;

  auto clamp = [&](std::vector<double> p) {
    return opts.project ? opts.project->clamp(std::move(p)) : p;
  };
  auto eval = [&](const std::vector<double>& p) {
    ++res.evals;
    double v = f(p);
    if (v < res.f) {
      res.f = v;
      res.x = p;
    }
    return v;
  };

  std::vector<std::vector<double>> vx(n + 1);
  std::vector<double> vf(n + 1);
  vx[0] = clamp(x0);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = x0;
    p[i] += step[i];
    vx[i + 1] = clamp(std::move(p));
  }
  for (std::size_t i = 0; i <= n; ++i) {
    if (res.evals >= opts.max_evals) return res;
    vf[i] = eval(vx[i]);
  }

  std::vector<std::size_t> ord(n + 1);
  while (res.evals < opts.max_evals) {
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](auto a, auto b) { return vf[a] < vf[b]; });
    std::size_t best = ord[0], worst = ord[n], second = ord[n - 1];

    double diam = 0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t d = 0; d < n; ++d)
        diam = std::max(diam, std::abs(vx[ord[i]][d] - vx[best][d]));
    if (diam < opts.xtol) {
      res.collapsed = true;
      return res;
    }
    if (opts.ftol > 0 && vf[worst] - vf[best] < opts.ftol) return res;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t d = 0; d < n; ++d) centroid[d] += vx[i][d] / n;

    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + coef * (centroid[d] - vx[worst][d]);
      return clamp(std::move(p));
    };

    auto xr = blend(1.0);
    double fr = eval(xr);
    if (fr < vf[best]) {
      if (res.evals >= opts.max_evals) return res;
      auto xe = blend(2.0);
      double fe = eval(xe);
      if (fe < fr) {
        vx[worst] = std::move(xe);
        vf[worst] = fe;
      } else {
        vx[worst] = std::move(xr);
        vf[worst] = fr;
      }
      continue;
    }
    if (fr < vf[second]) {
      vx[worst] = std::move(xr);
      vf[worst] = fr;
      continue;
    }
    if (res.evals >= opts.max_evals) return res;
    bool outside = fr < vf[worst];
    auto xc = blend(outside ? 0.5 : -0.5);
    double fc = eval(xc);
    if (fc < (outside ? fr : vf[worst])) {
      vx[worst] = std::move(xc);
      vf[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) vx[i][d] = vx[best][d] + 0.5 * (vx[i][d] - vx[best][d]);
      vx[i] = clamp(std::move(vx[i]));
      if (res.evals >= opts.max_evals) return res;
      vf[i] = eval(vx[i]);
    }
  }
  return res;
}

}  // namespace qcbo
