#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcbo/controls.hpp"
#include "qcbo/rng.hpp"

namespace qcbo::ryd {

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using complexd = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Lattice {
  std::vector<Vector3d> positions;  // meters
  double spacing = 1.5e-6;
  std::string geometry = "custom";

  int size() const { return static_cast<int>(positions.size()); }

  static Lattice chain(int n, double spacing = 1.5e-6) {
    Lattice l;
    l.spacing = spacing;
    l.geometry = "chain-" + std::to_string(n);
    for (int i = 0; i < n; ++i) l.positions.emplace_back(i * spacing, 0.0, 0.0);
    return l;
  }
  static Lattice square3x3(double spacing = 1.5e-6) {
    Lattice l;
    l.spacing = spacing;
    l.geometry = "square-3x3";
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) l.positions.emplace_back(i * spacing, j * spacing, 0.0);
    return l;
  }
  static Lattice cube2x2x2(double spacing = 1.5e-6) {
    Lattice l;
    l.spacing = spacing;
    l.geometry = "cube-2x2x2";
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) l.positions.emplace_back(i * spacing, j * spacing, k * spacing);
    return l;
  }
};

struct RydbergParams {
  double c6 = 1.56e-26;        // Hz m^6
  double detection_prob = 1.0;
  double fill_prob = 1.0;

  void validate() const {
    if (!(c6 > 0)) throw std::invalid_argument("params: c6 must be positive");
    if (!(detection_prob >= 0 && detection_prob <= 1))
      throw std::invalid_argument("params: detection_prob in [0,1]");
    if (!(fill_prob >= 0 && fill_prob <= 1))
      throw std::invalid_argument("params: fill_prob in [0,1]");
  }
};

// Pairwise van-der-Waals shift in Hz.
inline double interaction(const Vector3d& ri, const Vector3d& rj, double c6) {
  double r = (ri - rj).norm();
  if (!(r > 0)) throw std::domain_error("interaction: coincident positions");
  double r3 = r * r * r;
  return c6 / (r3 * r3);
}

constexpr int kAtomCap = 14;

// Spin-1/2 model over the occupied sites; basis index bit i = atom i excited.
// The interaction diagonal eps is pulse-independent and precomputed.
struct SpinSystem {
  int n_atoms = 0;
  std::vector<int> sites;       // original lattice indices, one per bit
  std::vector<double> eps;      // 2^n interaction diagonal (Hz)
  std::vector<int> popcount;    // 2^n excitation counts
  double eps_mid = 0.0;         // (min+max)/2 of eps, used as a gauge shift

  int dim() const { return 1 << n_atoms; }
};

inline SpinSystem make_system(const Lattice& lattice, const RydbergParams& params,
                              const std::vector<int>& occupied) {
  params.validate();
  int n = static_cast<int>(occupied.size());
  if (n > kAtomCap) throw std::runtime_error("spin system: atom count above 2^N cap");
  SpinSystem s;
  s.n_atoms = n;
  s.sites = occupied;
  int dim = 1 << n;
  std::vector<double> pairv(static_cast<std::size_t>(n * n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      double v = interaction(lattice.positions[static_cast<std::size_t>(occupied[a])],
                             lattice.positions[static_cast<std::size_t>(occupied[b])], params.c6);
      pairv[static_cast<std::size_t>(a * n + b)] = v;
    }
  s.eps.assign(static_cast<std::size_t>(dim), 0.0);
  s.popcount.assign(static_cast<std::size_t>(dim), 0);
  for (int st = 0; st < dim; ++st) {
    s.popcount[static_cast<std::size_t>(st)] = std::popcount(static_cast<unsigned>(st));
    double e = 0.0;
    for (int a = 0; a < n; ++a)
      if (st & (1 << a))
        for (int b = a + 1; b < n; ++b)
          if (st & (1 << b)) e += pairv[static_cast<std::size_t>(a * n + b)];
    s.eps[static_cast<std::size_t>(st)] = e;
  }
  auto [mn, mx] = std::minmax_element(s.eps.begin(), s.eps.end());
  s.eps_mid = 0.5 * (*mn + *mx);
  return s;
}

inline SpinSystem make_system(const Lattice& lattice, const RydbergParams& params) {
  std::vector<int> all(static_cast<std::size_t>(lattice.size()));
  std::iota(all.begin(), all.end(), 0);
  return make_system(lattice, params, all);
}

// Dense Hamiltonian in Hz: diag -Delta*n_e + eps, off-diagonal Omega/2 between
// states differing in one bit.
inline MatrixXd build_hamiltonian(const Lattice& lattice, double omega_hz, double delta_hz,
                                  const RydbergParams& params, const std::vector<int>& occupied) {
  if (!(omega_hz >= 0)) throw std::invalid_argument("hamiltonian: omega must be >= 0");
  SpinSystem s = make_system(lattice, params, occupied);
  int dim = s.dim();
  MatrixXd h = MatrixXd::Zero(dim, dim);
  for (int st = 0; st < dim; ++st) {
    h(st, st) = -delta_hz * s.popcount[static_cast<std::size_t>(st)] +
                s.eps[static_cast<std::size_t>(st)];
    for (int b = 0; b < s.n_atoms; ++b) h(st, st ^ (1 << b)) = 0.5 * omega_hz;
  }
  return h;
}

inline MatrixXd build_hamiltonian(const Lattice& lattice, double omega_hz, double delta_hz,
                                  const RydbergParams& params) {
  std::vector<int> all(static_cast<std::size_t>(lattice.size()));
  std::iota(all.begin(), all.end(), 0);
  return build_hamiltonian(lattice, omega_hz, delta_hz, params, all);
}

// Energies at Omega=0 for each detuning: the Hamiltonian is diagonal there.
// Returns one ascending-sorted row per grid point.
inline std::vector<std::vector<double>> zero_field_spectrum(const Lattice& lattice,
                                                            const std::vector<double>& delta_grid,
                                                            const RydbergParams& params) {
  SpinSystem s = make_system(lattice, params);
  std::vector<std::vector<double>> out;
  for (double d : delta_grid) {
    std::vector<double> e(static_cast<std::size_t>(s.dim()));
    for (int st = 0; st < s.dim(); ++st)
      e[static_cast<std::size_t>(st)] =
          -d * s.popcount[static_cast<std::size_t>(st)] + s.eps[static_cast<std::size_t>(st)];
    std::sort(e.begin(), e.end());
    out.push_back(std::move(e));
  }
  return out;
}

namespace detail {

// Per-evolution scratch: the two static diagonal components plus the slice
// phase factor, so the inner loops allocate nothing. The state and the
// factor are kept as separate re/im planes; std::complex arithmetic defeats
// the vectorizer, plain double planes do not.
struct EvolveWorkspace {
  VectorXd pc_shift;        // popcount - N/2
  VectorXd eps_shift;       // eps - eps_mid
  double eps_absmax = 0.0;  // max |eps_shift|, bounds the slice phase
  VectorXd fc, fs;          // cos/sin planes of the slice factor

  explicit EvolveWorkspace(const SpinSystem& sys) {
    const int dim = sys.dim();
    pc_shift.resize(dim);
    eps_shift.resize(dim);
    const double half_n = 0.5 * sys.n_atoms;
    for (int st = 0; st < dim; ++st) {
      pc_shift[st] = sys.popcount[static_cast<std::size_t>(st)] - half_n;
      eps_shift[st] = sys.eps[static_cast<std::size_t>(st)] - sys.eps_mid;
      eps_absmax = std::max(eps_absmax, std::abs(eps_shift[st]));
    }
    fc.resize(dim);
    fs.resize(dim);
  }
};

// sin/cos pair via Cody-Waite pi/2 reduction and a Horner series on the
// reduced range. Branch-free so the per-state phase loop vectorizes; the
// reduction is exact only while the quadrant index fits 26 bits, so callers
// must bound |x| (the slice loop caps it at 1e6). Max error ~1 ulp.
inline void fast_sincos(double x, double& s_out, double& c_out) {
  constexpr double kTwoOverPi = 0.6366197723675814;
  constexpr double kPiHalf1 = 1.5707963109016418;      // 26-bit head of pi/2
  constexpr double kPiHalf2 = 1.5893254712295857e-08;  // next 26 bits
  constexpr double kPiHalf3 = 6.123233995736766e-17;   // tail
  double kd = std::nearbyint(x * kTwoOverPi);
  double r = x - kd * kPiHalf1;
  r = r - kd * kPiHalf2;
  r = r - kd * kPiHalf3;
  int q = static_cast<int>(kd);
  double r2 = r * r;
  double sp = -7.64716373181981641e-13 + r2 * 2.81145725434552060e-15;
  sp = 1.60590438368216133e-10 + r2 * sp;
  sp = -2.50521083854417202e-08 + r2 * sp;
  sp = 2.75573192239858925e-06 + r2 * sp;
  sp = -1.98412698412698413e-04 + r2 * sp;
  sp = 8.33333333333333322e-03 + r2 * sp;
  sp = -1.66666666666666657e-01 + r2 * sp;
  sp = r + r * r2 * sp;
  double cp = -1.14707455977297245e-11 + r2 * 4.77947733238738525e-14;
  cp = 2.08767569878681002e-09 + r2 * cp;
  cp = -2.75573192239858883e-07 + r2 * cp;
  cp = 2.48015873015873016e-05 + r2 * cp;
  cp = -1.38888888888888894e-03 + r2 * cp;
  cp = 4.16666666666666644e-02 + r2 * cp;
  cp = 1.0 - r2 * 0.5 + r2 * r2 * cp;
  // Quadrant recombination via cos(q pi/2), sin(q pi/2) in {-1, 0, 1}: one
  // factor is always zero, so the rotation is exact and branch-free.
  int qm = q & 3;
  double cq = static_cast<double>((1 - (qm & 2)) * (1 - (qm & 1)));
  double sq = static_cast<double>((qm & 1) * (1 - (qm & 2)));
  s_out = sp * cq + cp * sq;
  c_out = cp * cq - sp * sq;
}

// exp(-i 2pi (Omega/2) tau sum_b sigma_x_b): the single-site rotations
// commute, so the exact exponential factors into one 2x2 butterfly per atom.
// Adjacent bits share the angle and are fused into a 4x4 pass, which halves
// the arithmetic. The coupling coefficients split into real parts (cc, ss)
// and a pure-imaginary part (-i c s), so on re/im planes every update is a
// real fused multiply-add.
// One fused two-bit pass at compile-time stride, so the inner loop has a
// known trip count and unit-stride streams the vectorizer accepts.
template <int H1>
inline void rabi_pair_pass(int dim, double cc, double ss, double m, double* __restrict X,
                           double* __restrict Y) {
  for (int base = 0; base < dim; base += 4 * H1)
    for (int k = 0; k < H1; ++k) {
      const int i00 = base + k, i01 = base + H1 + k;
      const int i10 = base + 2 * H1 + k, i11 = base + 3 * H1 + k;
      const double x00 = X[i00], x01 = X[i01], x10 = X[i10], x11 = X[i11];
      const double y00 = Y[i00], y01 = Y[i01], y10 = Y[i10], y11 = Y[i11];
      const double sx1 = x00 + x11, sx2 = x01 + x10;
      const double sy1 = y00 + y11, sy2 = y01 + y10;
      X[i00] = cc * x00 + ss * x11 + m * sy2;
      Y[i00] = cc * y00 + ss * y11 - m * sx2;
      X[i01] = cc * x01 + ss * x10 + m * sy1;
      Y[i01] = cc * y01 + ss * y10 - m * sx1;
      X[i10] = cc * x10 + ss * x01 + m * sy1;
      Y[i10] = cc * y10 + ss * y01 - m * sx1;
      X[i11] = cc * x11 + ss * x00 + m * sy2;
      Y[i11] = cc * y11 + ss * y00 - m * sx2;
    }
}

inline void rabi_rotation(const SpinSystem& sys, double omega, double tau, VectorXd& xr,
                          VectorXd& xi) {
  const int n = sys.n_atoms, dim = sys.dim();
  double theta = kTwoPi * 0.5 * omega * tau;
  if (theta == 0.0) return;
  const double c = std::cos(theta), s = std::sin(theta);
  const double cc = c * c, ss = -s * s, m = c * s;
  double* __restrict X = xr.data();
  double* __restrict Y = xi.data();
  int b = 0;
  for (; b + 1 < n; b += 2) {
    // Fused pass strides are 4^j only; the cap keeps the switch exhaustive.
    static_assert(kAtomCap <= 14);
    switch (1 << b) {
      case 1: rabi_pair_pass<1>(dim, cc, ss, m, X, Y); break;
      case 4: rabi_pair_pass<4>(dim, cc, ss, m, X, Y); break;
      case 16: rabi_pair_pass<16>(dim, cc, ss, m, X, Y); break;
      case 64: rabi_pair_pass<64>(dim, cc, ss, m, X, Y); break;
      case 256: rabi_pair_pass<256>(dim, cc, ss, m, X, Y); break;
      case 1024: rabi_pair_pass<1024>(dim, cc, ss, m, X, Y); break;
      default: rabi_pair_pass<4096>(dim, cc, ss, m, X, Y); break;
    }
  }
  if (b < n) {
    const int half = 1 << b;
    for (int base = 0; base < dim; base += 2 * half)
      for (int k = 0; k < half; ++k) {
        const int iu = base + k, iv = base + half + k;
        const double ur = X[iu], ui = Y[iu], vr = X[iv], vi = Y[iv];
        X[iu] = c * ur + s * vi;
        Y[iu] = c * ui - s * vr;
        X[iv] = c * vr + s * ui;
        Y[iv] = c * vi - s * ur;
      }
  }
}

// In-place multiply of the state planes by the unit factor (fc, fs).
inline void apply_phase(const VectorXd& fc, const VectorXd& fs, VectorXd& xr, VectorXd& xi) {
  const int dim = static_cast<int>(xr.size());
  const double* __restrict C = fc.data();
  const double* __restrict S = fs.data();
  double* __restrict X = xr.data();
  double* __restrict Y = xi.data();
  for (int st = 0; st < dim; ++st) {
    const double r = X[st], i = Y[st];
    X[st] = r * C[st] - i * S[st];
    Y[st] = r * S[st] + i * C[st];
  }
}

// Symmetric diagonal/coupling slice over [t, t+h] with the fields frozen at
// the slice midpoint. The diagonal is D = -Delta (n - N/2) + (eps - eps_mid);
// the popcount and midpoint shifts are pure gauge and keep the phase rates
// centered around zero. Every factor is unitary to roundoff, so norm is
// conserved no matter how many slices are taken.
inline void strang_slice(const SpinSystem& sys, EvolveWorkspace& ws,
                         const std::function<std::pair<double, double>(double)>& fields, double t,
                         double h, VectorXd& xr, VectorXd& xi) {
  auto [omega, delta] = fields(t + 0.5 * h);
  const int dim = sys.dim();
  const double scale = -kTwoPi * 0.5 * h;
  const double phase_cap =
      std::abs(scale) * (ws.eps_absmax + std::abs(delta) * 0.5 * sys.n_atoms);
  if (phase_cap < 1e6) {
    for (int st = 0; st < dim; ++st) {
      double phi = scale * (ws.eps_shift[st] - delta * ws.pc_shift[st]);
      fast_sincos(phi, ws.fs[st], ws.fc[st]);
    }
  } else {
    for (int st = 0; st < dim; ++st) {
      double phi = scale * (ws.eps_shift[st] - delta * ws.pc_shift[st]);
      ws.fc[st] = std::cos(phi);
      ws.fs[st] = std::sin(phi);
    }
  }
  apply_phase(ws.fc, ws.fs, xr, xi);
  rabi_rotation(sys, omega, h, xr, xi);
  apply_phase(ws.fc, ws.fs, xr, xi);
}

// Seven-slice symmetric composition; classical 6th order. Some interior
// slices run backward, but every field evaluation (slice midpoints only)
// stays inside [t, t+h].
inline void composed_step(const SpinSystem& sys, EvolveWorkspace& ws,
                          const std::function<std::pair<double, double>(double)>& fields, double t,
                          double h, VectorXd& xr, VectorXd& xi) {
  constexpr double w1 = -1.17767998417887;
  constexpr double w2 = 0.235573213359357;
  constexpr double w3 = 0.784513610477560;
  constexpr double w0 = 1.0 - 2.0 * (w1 + w2 + w3);
  constexpr double w[7] = {w3, w2, w1, w0, w1, w2, w3};
  double s = t;
  for (double wi : w) {
    strang_slice(sys, ws, fields, s, wi * h, xr, xi);
    s += wi * h;
  }
}

}  // namespace detail

// Adaptive split-operator integration of i dpsi/dt = 2pi H(t) psi. Step
// doubling controls the splitting error against `tolerance` as a whole-
// evolution budget; the half-step result is kept. Asserts norm drift below
// 1e-6 (roundoff-level here, every factor being unitary), then renormalizes
// once.
inline VectorXcd evolve_fields(const SpinSystem& sys, const VectorXcd& psi0,
                               const std::function<std::pair<double, double>(double)>& fields,
                               double total_time, double tolerance = 1e-8) {
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw std::domain_error("evolve: state not normalized");
  if (psi0.size() != sys.dim()) throw std::invalid_argument("evolve: state dimension mismatch");
  VectorXd cur_r = psi0.real(), cur_i = psi0.imag();
  VectorXd full_r(cur_r.size()), full_i(cur_r.size());
  VectorXd pair_r(cur_r.size()), pair_i(cur_r.size());
  detail::EvolveWorkspace ws(sys);
  double t = 0.0, dt = total_time * 1e-3;
  const double dt_floor = total_time * 1e-15;
  while (t < total_time) {
    if (t + dt > total_time) dt = total_time - t;
    full_r = cur_r;
    full_i = cur_i;
    detail::composed_step(sys, ws, fields, t, dt, full_r, full_i);
    pair_r = cur_r;
    pair_i = cur_i;
    detail::composed_step(sys, ws, fields, t, 0.5 * dt, pair_r, pair_i);
    detail::composed_step(sys, ws, fields, t + 0.5 * dt, 0.5 * dt, pair_r, pair_i);
    double err =
        std::sqrt((pair_r - full_r).squaredNorm() + (pair_i - full_i).squaredNorm());
    // Per-step budget proportional to the step keeps the accumulated error
    // near `tolerance`; the floor stops the controller from chasing error
    // estimates below measurement roundoff.
    double allowed = std::max(tolerance * dt / total_time,
                              64.0 * std::numeric_limits<double>::epsilon());
    double factor = 0.9 * std::pow(allowed / std::max(err, 1e-300), 1.0 / 7.0);
    if (err <= allowed) {
      cur_r.swap(pair_r);
      cur_i.swap(pair_i);
      t += dt;
      dt *= std::clamp(factor, 0.25, 4.0);
    } else {
      dt *= std::clamp(factor, 0.1, 0.9);
      if (dt < dt_floor)
        throw std::runtime_error("evolve: step size collapsed at t = " + std::to_string(t));
    }
  }
  double norm = std::sqrt(cur_r.squaredNorm() + cur_i.squaredNorm());
  if (std::abs(norm - 1.0) > 1e-6)
    throw std::runtime_error("evolve: norm drift above 1e-6, integration unreliable");
  VectorXcd out(sys.dim());
  for (int st = 0; st < sys.dim(); ++st) out[st] = complexd(cur_r[st], cur_i[st]);
  return out / norm;
}

inline VectorXcd evolve(const SpinSystem& sys, const VectorXcd& psi0, const PulseSpec& pulse,
                        double tolerance = 1e-8) {
  pulse.validate();
  return evolve_fields(
      sys, psi0, [&pulse](double t) { return pulse(t); }, pulse.total_time, tolerance);
}

inline VectorXcd ground_state_vector(const SpinSystem& sys) {
  VectorXcd psi = VectorXcd::Zero(sys.dim());
  psi[0] = 1.0;
  return psi;
}

// Total population of the n_e-excitation manifold.
inline double fidelity_manifold(const SpinSystem& sys, const VectorXcd& psi, int n_e) {
  if (n_e < 0 || n_e > sys.n_atoms) throw std::invalid_argument("fidelity: bad manifold");
  double f = 0.0;
  for (int st = 0; st < sys.dim(); ++st)
    if (sys.popcount[static_cast<std::size_t>(st)] == n_e) f += std::norm(psi[st]);
  return f;
}

inline std::vector<double> site_excitation_probabilities(const SpinSystem& sys,
                                                         const VectorXcd& psi) {
  std::vector<double> p(static_cast<std::size_t>(sys.n_atoms), 0.0);
  for (int st = 0; st < sys.dim(); ++st) {
    double w = std::norm(psi[st]);
    for (int b = 0; b < sys.n_atoms; ++b)
      if (st & (1 << b)) p[static_cast<std::size_t>(b)] += w;
  }
  return p;
}

// Multiplicative Gaussian noise on every knot, clamped back into bounds.
inline PulseSpec perturb_pulse(const PulseSpec& pulse, double relative_sigma, Rng& rng) {
  PulseSpec out = pulse;
  for (auto& w : out.rabi_knots)
    w = std::clamp(w * (1.0 + relative_sigma * normal01(rng)), PulseBounds::omega_lo,
                   PulseBounds::omega_hi);
  for (auto& d : out.detuning_knots)
    d = std::clamp(d * (1.0 + relative_sigma * normal01(rng)), PulseBounds::delta_lo,
                   PulseBounds::delta_hi);
  return out;
}

// Independent per-site occupancy.
inline std::vector<int> sample_imperfect_lattice(const Lattice& lattice, double fill_prob,
                                                 Rng& rng) {
  if (!(fill_prob >= 0 && fill_prob <= 1))
    throw std::invalid_argument("fill_prob outside [0,1]");
  std::vector<int> occupied;
  for (int i = 0; i < lattice.size(); ++i)
    if (uniform01(rng) < fill_prob) occupied.push_back(i);
  return occupied;
}

// Expected number of detected excitations.
inline double detected_excitations_exact(const SpinSystem& sys, const VectorXcd& psi,
                                         double detection_prob) {
  auto p = site_excitation_probabilities(sys, psi);
  double s = 0.0;
  for (double v : p) s += v;
  return detection_prob * s;
}

// Finite-shot estimate: Born-rule configuration draws, each excited atom
// detected independently.
inline double detected_excitations_sampled(const SpinSystem& sys, const VectorXcd& psi,
                                           double detection_prob, int shots, Rng& rng) {
  if (shots < 1) throw std::invalid_argument("detected: need shots >= 1");
  int dim = sys.dim();
  std::vector<double> cum(static_cast<std::size_t>(dim));
  double total = 0.0;
  for (int i = 0; i < dim; ++i) {
    total += std::norm(psi[i]);
    cum[static_cast<std::size_t>(i)] = total;
  }
  long long acc = 0;
  for (int s = 0; s < shots; ++s) {
    double u = uniform01(rng) * total;
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    int st = std::min(static_cast<int>(it - cum.begin()), dim - 1);
    for (int b = 0; b < sys.n_atoms; ++b)
      if ((st & (1 << b)) && uniform01(rng) < detection_prob) ++acc;
  }
  return static_cast<double>(acc) / shots;
}

struct CrystalMinimum {
  double energy = 0.0;                     // minimal pairwise interaction sum (Hz)
  std::vector<unsigned> configurations;    // all bitmasks attaining it
};

// Exhaustive scan of the n_e-excitation manifold for minimal interaction
// energy; degenerate minima are all returned (1e-6 relative tie tolerance).
inline CrystalMinimum minimal_interaction_configs(const Lattice& lattice,
                                                  const RydbergParams& params, int n_e) {
  SpinSystem s = make_system(lattice, params);
  if (n_e < 0 || n_e > s.n_atoms) throw std::invalid_argument("crystal: bad manifold");
  CrystalMinimum out;
  out.energy = std::numeric_limits<double>::infinity();
  for (int st = 0; st < s.dim(); ++st) {
    if (s.popcount[static_cast<std::size_t>(st)] != n_e) continue;
    double e = s.eps[static_cast<std::size_t>(st)];
    if (e < out.energy * (1.0 - 1e-6)) {
      out.energy = e;
      out.configurations = {static_cast<unsigned>(st)};
    } else if (e <= out.energy * (1.0 + 1e-6)) {
      out.configurations.push_back(static_cast<unsigned>(st));
    }
  }
  return out;
}

}  // namespace qcbo::ryd
