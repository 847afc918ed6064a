#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "qcbo/controls.hpp"
#include "qcbo/rng.hpp"

namespace qcbo::bh {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using complexd = std::complex<double>;

struct FockBasis {
  int sites = 0;
  int bosons = 0;
  std::vector<std::vector<int>> states;  // lexicographic, each sums to bosons
  std::map<std::vector<int>, int> index;

  int dim() const { return static_cast<int>(states.size()); }
};

inline FockBasis build_basis(int L, int N) {
  if (L < 1 || N < 0) throw std::invalid_argument("basis: need L >= 1, N >= 0");
  // C(N+L-1, N) with overflow-safe running product
  double count = 1.0;
  for (int i = 1; i <= N; ++i) count *= static_cast<double>(L - 1 + i) / i;
  if (count > 1e6) throw std::runtime_error("basis: dimension exceeds 1e6 cap");

  FockBasis b;
  b.sites = L;
  b.bosons = N;
  std::vector<int> cur(static_cast<std::size_t>(L), 0);
  std::function<void(int, int)> rec = [&](int site, int left) {
    if (site == L - 1) {
      cur[static_cast<std::size_t>(site)] = left;
      b.states.push_back(cur);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      cur[static_cast<std::size_t>(site)] = n;
      rec(site + 1, left - n);
    }
  };
  rec(0, N);
  for (int i = 0; i < b.dim(); ++i) b.index[b.states[static_cast<std::size_t>(i)]] = i;
  return b;
}

// Hopping structure and interaction diagonal; gamma enters only as scalars,
// so one structure serves every point of a ramp.
struct BhStructure {
  FockBasis basis;
  VectorXd nn1;                           // sum_j n_j (n_j - 1) per state
  std::vector<std::array<int, 2>> pairs;  // unordered state pairs coupled by hopping
  std::vector<double> amps;               // matrix element magnitudes

  int dim() const { return basis.dim(); }
};

inline std::shared_ptr<const BhStructure> make_structure(const FockBasis& basis) {
  auto s = std::make_shared<BhStructure>();
  s->basis = basis;
  int L = basis.sites, dim = basis.dim();
  s->nn1 = VectorXd::Zero(dim);
  std::map<std::pair<int, int>, double> acc;
  for (int st = 0; st < dim; ++st) {
    const auto& occ = basis.states[static_cast<std::size_t>(st)];
    double d = 0;
    for (int i = 0; i < L; ++i) d += static_cast<double>(occ[static_cast<std::size_t>(i)]) *
                                     (occ[static_cast<std::size_t>(i)] - 1);
    s->nn1[st] = d;
    for (int i = 0; i < L; ++i) {
      int j = (i + 1) % L;
      auto hop = [&](int from, int to) {
        if (occ[static_cast<std::size_t>(from)] == 0) return;
        auto t = occ;
        double amp = std::sqrt(static_cast<double>(t[static_cast<std::size_t>(from)])) *
                     std::sqrt(static_cast<double>(t[static_cast<std::size_t>(to)] + 1));
        t[static_cast<std::size_t>(from)]--;
        t[static_cast<std::size_t>(to)]++;
        int st2 = basis.index.at(t);
        auto key = std::minmax(st, st2);
        acc[{key.first, key.second}] += amp;
      };
      hop(i, j);
      hop(j, i);
    }
  }
  // every unordered element was accumulated from both of its rows
  for (const auto& [key, amp] : acc) {
    s->pairs.push_back({key.first, key.second});
    s->amps.push_back(0.5 * amp);
  }
  return s;
}

// H(gamma) = -(1-gamma) * hopping + (gamma/2) * interaction diagonal.
struct BhHamiltonian {
  std::shared_ptr<const BhStructure> structure;
  double gamma = 0.0;

  int dim() const { return structure->dim(); }
  const FockBasis& basis() const { return structure->basis; }

  void apply(const VectorXcd& x, VectorXcd& y) const {
    const auto& s = *structure;
    double hop = -(1.0 - gamma), dg = 0.5 * gamma;
    y = (dg * s.nn1.array()).matrix().asDiagonal() * x;
    for (std::size_t p = 0; p < s.pairs.size(); ++p) {
      double w = hop * s.amps[p];
      int a = s.pairs[p][0], b = s.pairs[p][1];
      y[a] += w * x[b];
      y[b] += w * x[a];
    }
  }

  MatrixXd dense() const {
    const auto& s = *structure;
    MatrixXd H = MatrixXd::Zero(dim(), dim());
    for (int i = 0; i < dim(); ++i) H(i, i) = 0.5 * gamma * s.nn1[i];
    for (std::size_t p = 0; p < s.pairs.size(); ++p) {
      double w = -(1.0 - gamma) * s.amps[p];
      H(s.pairs[p][0], s.pairs[p][1]) += w;
      H(s.pairs[p][1], s.pairs[p][0]) += w;
    }
    return H;
  }
};

inline BhHamiltonian build_hamiltonian(const FockBasis& basis, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::domain_error("hamiltonian: gamma outside [0,1]");
  return {make_structure(basis), gamma};
}

inline BhHamiltonian with_gamma(const BhHamiltonian& h, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::domain_error("hamiltonian: gamma outside [0,1]");
  return {h.structure, gamma};
}

constexpr int kDenseCap = 2000;

inline VectorXd full_spectrum(const BhHamiltonian& h) {
  if (h.dim() > kDenseCap) throw std::runtime_error("spectrum: dimension above dense cap");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

namespace detail {
// Lanczos with full reorthogonalization, lowest eigenpair only.
inline std::pair<double, VectorXd> lanczos_ground(const BhHamiltonian& h, int max_iter = 200,
                                                  double tol = 1e-12) {
  int n = h.dim();
  Rng rng(12345);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal01(rng);
  v.normalize();
  std::vector<VectorXd> basis_vecs{v};
  std::vector<double> alpha, beta;
  VectorXcd tmp_in(n), tmp_out(n);
  double prev_e = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    tmp_in = basis_vecs.back().cast<complexd>();
    h.apply(tmp_in, tmp_out);
    VectorXd w = tmp_out.real();
    alpha.push_back(basis_vecs.back().dot(w));
    for (const auto& q : basis_vecs) w -= q.dot(w) * q;
    for (const auto& q : basis_vecs) w -= q.dot(w) * q;
    double nb = w.norm();
    int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) {
        T(i, i + 1) = beta[static_cast<std::size_t>(i)];
        T(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
    double e0 = es.eigenvalues()(0);
    if (std::abs(e0 - prev_e) < tol * std::max(1.0, std::abs(e0)) || nb < 1e-13 ||
        it == max_iter - 1) {
      VectorXd gs = VectorXd::Zero(n);
      for (int i = 0; i < m; ++i) gs += es.eigenvectors()(i, 0) * basis_vecs[static_cast<std::size_t>(i)];
      gs.normalize();
      return {e0, gs};
    }
    prev_e = e0;
    beta.push_back(nb);
    basis_vecs.push_back(w / nb);
  }
  throw std::logic_error("lanczos: unreachable");
}
}  // namespace detail

inline std::pair<double, VectorXcd> ground_state(const BhHamiltonian& h) {
  if (h.dim() <= kDenseCap) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h.dense());
    return {es.eigenvalues()(0), es.eigenvectors().col(0).cast<complexd>()};
  }
  auto [e, v] = detail::lanczos_ground(h);
  return {e, v.cast<complexd>()};
}

// Gap between ground and first excited state at a fixed gamma.
inline double gap_at(const BhHamiltonian& h, double gamma) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(with_gamma(h, gamma).dense(),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

struct SpeedLimit {
  double gap_min = 0.0;
  double t_qsl = 0.0;
  double gamma_at = 0.0;
};

// Grid scan over gamma followed by golden-section refinement of the bracket.
inline SpeedLimit quantum_speed_limit(int L, int N, int grid_size = 201) {
  if (grid_size < 51) throw std::invalid_argument("speed limit: grid_size must be >= 51");
  FockBasis basis = build_basis(L, N);
  BhHamiltonian h = build_hamiltonian(basis, 0.0);
  int best_i = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i) {
    double g = static_cast<double>(i) / (grid_size - 1);
    double gap = gap_at(h, g);
    if (gap < best_gap) {
      best_gap = gap;
      best_i = i;
    }
  }
  double lo = std::max(0.0, static_cast<double>(best_i - 1) / (grid_size - 1));
  double hi = std::min(1.0, static_cast<double>(best_i + 1) / (grid_size - 1));
  const double gr = 0.61803398874989484820458683436564;
  double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
  double f1 = gap_at(h, c1), f2 = gap_at(h, c2);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - gr * (hi - lo);
      f1 = gap_at(h, c1);
    } else {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + gr * (hi - lo);
      f2 = gap_at(h, c2);
    }
  }
  SpeedLimit out;
  out.gamma_at = 0.5 * (lo + hi);
  out.gap_min = gap_at(h, out.gamma_at);
  if (out.gap_min < 1e-12) throw std::runtime_error("speed limit: gap numerically degenerate");
  out.t_qsl = M_PI / out.gap_min;
  return out;
}

constexpr int kDefaultSubsteps = 1600;

// Piecewise-constant midpoint propagation: on each substep the state is
// advanced by exp(-i H(gamma_mid) dt), applied as a truncated power series.
// The series is run to machine precision, so each substep is unitary to
// rounding error and the result matches an eigendecomposition of the substep
// Hamiltonian to ~1e-13.
inline VectorXcd evolve_gamma(const BhHamiltonian& h, const VectorXcd& psi0,
                              const std::function<double(double)>& gamma_of_t, double total_time,
                              int steps) {
  if (steps < 1) throw std::invalid_argument("evolve: steps must be >= 1");
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw std::domain_error("evolve: state not normalized");
  VectorXcd psi = psi0, term = psi0, tmp(psi0.size());
  double dt = total_time / steps;
  for (int s = 0; s < steps; ++s) {
    double g = std::clamp(gamma_of_t((s + 0.5) * dt), 0.0, 1.0);
    BhHamiltonian hs = with_gamma(h, g);
    term = psi;
    for (int k = 1; k <= 90; ++k) {
      hs.apply(term, tmp);
      term = tmp * (complexd(0.0, -1.0) * dt / static_cast<double>(k));
      psi += term;
      if (term.norm() < 1e-16) break;
    }
  }
  return psi;
}

inline VectorXcd evolve(const BhHamiltonian& h, const VectorXcd& psi0, const RampSpec& ramp,
                        int steps = kDefaultSubsteps) {
  Ramp r(ramp);
  return evolve_gamma(
      h, psi0, [&](double t) { return r(t); }, ramp.total_time, steps);
}

inline int unit_filling_index(const FockBasis& basis) {
  if (basis.sites != basis.bosons)
    throw std::domain_error("unit filling requires equal sites and bosons");
  std::vector<int> mi(static_cast<std::size_t>(basis.sites), 1);
  return basis.index.at(mi);
}

// Overlap with the unit-filling Fock state.
inline double fidelity_mi(const FockBasis& basis, const VectorXcd& psi) {
  return std::norm(psi[unit_filling_index(basis)]);
}

// Mean over sites of the per-site unbiased sample variance of the occupation
// number, estimated from Born-rule draws.
inline double fom_exp(const FockBasis& basis, const VectorXcd& psi, int shots, Rng& rng) {
  if (shots < 2) throw std::invalid_argument("fom_exp: need shots >= 2");
  int dim = basis.dim(), L = basis.sites;
  std::vector<double> cum(static_cast<std::size_t>(dim));
  double total = 0.0;
  for (int i = 0; i < dim; ++i) {
    total += std::norm(psi[i]);
    cum[static_cast<std::size_t>(i)] = total;
  }
  std::vector<double> sum(static_cast<std::size_t>(L), 0.0),
      sumsq(static_cast<std::size_t>(L), 0.0);
  for (int s = 0; s < shots; ++s) {
    double u = uniform01(rng) * total;
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()),
                                            static_cast<std::size_t>(dim - 1));
    const auto& occ = basis.states[idx];
    for (int i = 0; i < L; ++i) {
      double n = occ[static_cast<std::size_t>(i)];
      sum[static_cast<std::size_t>(i)] += n;
      sumsq[static_cast<std::size_t>(i)] += n * n;
    }
  }
  double acc = 0.0;
  for (int i = 0; i < L; ++i) {
    double m = sum[static_cast<std::size_t>(i)] / shots;
    double var = (sumsq[static_cast<std::size_t>(i)] - shots * m * m) / (shots - 1);
    acc += std::max(0.0, var);
  }
  return acc / L;
}

// Exact shots->infinity limit of fom_exp.
inline double fom_exp_exact(const FockBasis& basis, const VectorXcd& psi) {
  int dim = basis.dim(), L = basis.sites;
  double acc = 0.0;
  for (int i = 0; i < L; ++i) {
    double m1 = 0.0, m2 = 0.0;
    for (int s = 0; s < dim; ++s) {
      double w = std::norm(psi[s]);
      double n = basis.states[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
      m1 += w * n;
      m2 += w * n * n;
    }
    acc += m2 - m1 * m1;
  }
  return acc / L;
}

// Populations of instantaneous eigenstate groups; groups are inclusive index
// ranges into the ascending spectrum.
inline std::vector<double> instantaneous_populations(
    const BhHamiltonian& h, const VectorXcd& psi,
    const std::vector<std::pair<int, int>>& groups) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h.dense());
  VectorXd weights(h.dim());
  for (int n = 0; n < h.dim(); ++n)
    weights[n] = std::norm(es.eigenvectors().col(n).cast<complexd>().dot(psi));
  std::vector<double> out;
  for (auto [lo, hi] : groups) {
    if (lo < 0 || hi >= h.dim() || lo > hi) throw std::invalid_argument("populations: bad group");
    double s = 0.0;
    for (int n = lo; n <= hi; ++n) s += weights[n];
    out.push_back(s);
  }
  return out;
}

}  // namespace qcbo::bh
