#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qcbo/spline.hpp"

namespace qcbo {

// Ramp knots at t_i = i*T/10, i = 1..10. The curve is pinned to 0 at t=0 and
// to 1 at t=T: the 10th optimizer coordinate is stored but ignored, keeping
// the optimization dimension at 10.
struct RampSpec {
  std::array<double, 10> knot_values{};
  double total_time = 1.0;

  static RampSpec from_vector(const std::vector<double>& v, double total_time) {
    if (v.size() != 10) throw std::invalid_argument("ramp: need 10 knot values");
    RampSpec s;
    std::copy(v.begin(), v.end(), s.knot_values.begin());
    s.total_time = total_time;
    return s;
  }
  std::vector<double> to_vector() const {
    return std::vector<double>(knot_values.begin(), knot_values.end());
  }
};

class Ramp {
 public:
  explicit Ramp(const RampSpec& spec) : total_time_(spec.total_time) {
    if (!(spec.total_time > 0)) throw std::invalid_argument("ramp: total_time must be positive");
    std::vector<double> xs(11), ys(11);
    for (int i = 0; i <= 10; ++i) {
      xs[static_cast<std::size_t>(i)] = i * spec.total_time / 10.0;
      ys[static_cast<std::size_t>(i)] =
          i == 0 ? 0.0 : (i == 10 ? 1.0 : spec.knot_values[static_cast<std::size_t>(i - 1)]);
    }
    spline_ = CubicSpline(std::move(xs), std::move(ys));
  }

  double operator()(double t) const {
    if (t < 0.0 || t > total_time_) throw std::domain_error("ramp: t outside [0, T]");
    return std::clamp(spline_(t), 0.0, 1.0);
  }

  double total_time() const { return total_time_; }

 private:
  double total_time_;
  CubicSpline spline_;
};

inline double eval_ramp(const RampSpec& spec, double t) { return Ramp(spec)(t); }

// Tapered-cosine window; taper is the total fraction of the duration spent in
// the two cosine edges.
inline double tukey(double t, double total_time, double taper) {
  if (t < 0.0 || t > total_time) throw std::domain_error("tukey: t outside [0, T]");
  if (!(taper > 0.0 && taper <= 1.0)) throw std::invalid_argument("tukey: taper in (0, 1]");
  double edge = taper * total_time / 2.0;
  double x = std::min(t, total_time - t);
  if (x >= edge) return 1.0;
  return 0.5 * (1.0 - std::cos(M_PI * x / edge));
}

struct PulseBounds {
  static constexpr double omega_lo = 0.0;
  static constexpr double omega_hi = 2.5e9;   // Hz
  static constexpr double delta_lo = -2.5e9;  // Hz
  static constexpr double delta_hi = 4.0e9;   // Hz
};

// Two quadratics through knots at T/4, T/2, 3T/4; the Rabi curve is then
// multiplied by the Tukey window so the drive vanishes at both ends.
struct PulseSpec {
  std::array<double, 3> rabi_knots{};      // Hz
  std::array<double, 3> detuning_knots{};  // Hz
  double total_time = 1e-6;                // s
  double tukey_taper = 0.2;

  void validate() const {
    if (!(total_time > 0)) throw std::invalid_argument("pulse: total_time must be positive");
    if (!(tukey_taper > 0 && tukey_taper <= 1))
      throw std::invalid_argument("pulse: taper in (0, 1]");
    for (double w : rabi_knots)
      if (w < PulseBounds::omega_lo || w > PulseBounds::omega_hi)
        throw std::invalid_argument("pulse: Rabi knot out of bounds");
    for (double d : detuning_knots)
      if (d < PulseBounds::delta_lo || d > PulseBounds::delta_hi)
        throw std::invalid_argument("pulse: detuning knot out of bounds");
  }

  static PulseSpec from_vector(const std::vector<double>& v, double total_time = 1e-6,
                               double taper = 0.2) {
    if (v.size() != 6) throw std::invalid_argument("pulse: need 6 knot values");
    PulseSpec s;
    std::copy(v.begin(), v.begin() + 3, s.rabi_knots.begin());
    std::copy(v.begin() + 3, v.end(), s.detuning_knots.begin());
    s.total_time = total_time;
    s.tukey_taper = taper;
    return s;
  }
  std::vector<double> to_vector() const {
    return {rabi_knots[0],     rabi_knots[1],     rabi_knots[2],
            detuning_knots[0], detuning_knots[1], detuning_knots[2]};
  }

  // (Omega, Delta) in Hz at time t, window applied after interpolation,
  // outputs clamped into the knot bounds.
  std::pair<double, double> operator()(double t) const {
    if (t < 0.0 || t > total_time) throw std::domain_error("pulse: t outside [0, T]");
    double t1 = total_time / 4.0, t2 = total_time / 2.0, t3 = 3.0 * total_time / 4.0;
    double omega =
        quadratic_through(t1, rabi_knots[0], t2, rabi_knots[1], t3, rabi_knots[2], t);
    double delta = quadratic_through(t1, detuning_knots[0], t2, detuning_knots[1], t3,
                                     detuning_knots[2], t);
    omega = std::clamp(omega, PulseBounds::omega_lo, PulseBounds::omega_hi);
    omega *= tukey(t, total_time, tukey_taper);
    delta = std::clamp(delta, PulseBounds::delta_lo, PulseBounds::delta_hi);
    return {omega, delta};
  }
};

inline std::pair<double, double> eval_pulse(const PulseSpec& spec, double t) { return spec(t); }

}  // namespace qcbo
