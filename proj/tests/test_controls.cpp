#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qcbo/controls.hpp"
#include "qcbo/rng.hpp"

using Catch::Approx;
using namespace qcbo;

namespace {

std::vector<double> linear_knots() {
  // Interior knots on the straight line from (0,0) to (T,1); the tenth
  // coordinate is carried but unused.
  std::vector<double> v(10, 0.0);
  for (int i = 1; i <= 9; ++i) v[static_cast<std::size_t>(i - 1)] = i / 10.0;
  v[9] = 0.123;
  return v;
}

}  // namespace

TEST_CASE("ramp passes through its endpoints and knots") {
  Rng rng = make_stream(600, 1);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> v(10);
    for (auto& x : v) x = uniform01(rng);
    double total = 2.0 + 3.0 * uniform01(rng);
    Ramp ramp(RampSpec::from_vector(v, total));
    CHECK(ramp(0.0) == Approx(0.0).margin(1e-12));
    CHECK(ramp(total) == Approx(1.0).margin(1e-12));
    for (int i = 1; i <= 9; ++i) {
      double expected = std::clamp(v[static_cast<std::size_t>(i - 1)], 0.0, 1.0);
      CHECK(ramp(i * total / 10.0) == Approx(expected).margin(1e-12));
    }
  }
}

TEST_CASE("a ramp through collinear knots is the straight line") {
  double total = 5.0;
  Ramp ramp(RampSpec::from_vector(linear_knots(), total));
  for (int i = 0; i <= 1000; ++i) {
    double t = total * i / 1000.0;
    CHECK(ramp(t) == Approx(t / total).margin(1e-9));
  }
}

TEST_CASE("ramp output is clamped to the unit interval") {
  // Alternating extreme knots force the interpolant to overshoot.
  std::vector<double> v{1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0};
  double total = 1.0;
  Ramp ramp(RampSpec::from_vector(v, total));
  for (int i = 0; i <= 2000; ++i) {
    double g = ramp(total * i / 2000.0);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
  }
}

TEST_CASE("ramp rejects queries outside its domain") {
  Ramp ramp(RampSpec::from_vector(linear_knots(), 1.0));
  CHECK_THROWS_AS(ramp(-1e-9), std::domain_error);
  CHECK_THROWS_AS(ramp(1.0 + 1e-9), std::domain_error);
}

TEST_CASE("ramp vector round-trips exactly") {
  auto v = linear_knots();
  RampSpec spec = RampSpec::from_vector(v, 3.5);
  CHECK(spec.to_vector() == v);
  CHECK(spec.total_time == 3.5);
  CHECK_THROWS_AS(RampSpec::from_vector({0.1, 0.2}, 1.0), std::invalid_argument);
}

TEST_CASE("tukey window has pinned values on the taper") {
  double total = 1.0, taper = 0.2;  // edge = 0.1
  CHECK(tukey(0.0, total, taper) == Approx(0.0).margin(1e-15));
  CHECK(tukey(total, total, taper) == Approx(0.0).margin(1e-15));
  CHECK(tukey(0.05, total, taper) == Approx(0.5).margin(1e-12));
  CHECK(tukey(0.95, total, taper) == Approx(0.5).margin(1e-12));
  CHECK(tukey(0.1, total, taper) == 1.0);
  CHECK(tukey(0.5, total, taper) == 1.0);
}

TEST_CASE("pulse hits its knots where the window is flat") {
  std::vector<double> th{1.0e9, 2.0e9, 0.5e9, -1.0e9, 3.0e9, 0.0};
  PulseSpec pulse = PulseSpec::from_vector(th);
  double T = pulse.total_time;
  auto [w1, d1] = pulse(T / 4);
  auto [w2, d2] = pulse(T / 2);
  auto [w3, d3] = pulse(3 * T / 4);
  CHECK(w1 == Approx(1.0e9).epsilon(1e-12));
  CHECK(w2 == Approx(2.0e9).epsilon(1e-12));
  CHECK(w3 == Approx(0.5e9).epsilon(1e-12));
  CHECK(d1 == Approx(-1.0e9).epsilon(1e-12));
  CHECK(d2 == Approx(3.0e9).epsilon(1e-12));
  CHECK(d3 == Approx(0.0).margin(1e-3));
}

TEST_CASE("pulse edges are forced to zero rabi drive") {
  std::vector<double> th{2.5e9, 2.5e9, 2.5e9, 4.0e9, 4.0e9, 4.0e9};
  PulseSpec pulse = PulseSpec::from_vector(th);
  auto [w0, d0] = pulse(0.0);
  auto [wT, dT] = pulse(pulse.total_time);
  CHECK(w0 == 0.0);
  CHECK(wT == 0.0);
  CHECK(d0 == Approx(4.0e9).epsilon(1e-12));
  CHECK(dT == Approx(4.0e9).epsilon(1e-12));
}

TEST_CASE("quadratic extrapolation is clamped into the field bounds") {
  // A parabola peaking mid-pulse extrapolates far below both lower bounds
  // near the edges; the clamp must catch it before the window is applied.
  std::vector<double> th{0.0, 2.5e9, 0.0, 0.0, 4.0e9, 0.0};
  PulseSpec pulse = PulseSpec::from_vector(th);
  auto [w, d] = pulse(0.0);
  CHECK(w == 0.0);
  CHECK(d == PulseBounds::delta_lo);
  Rng rng = make_stream(601, 1);
  for (int i = 0; i <= 500; ++i) {
    double t = pulse.total_time * i / 500.0;
    auto [omega, delta] = pulse(t);
    CHECK(omega >= PulseBounds::omega_lo);
    CHECK(omega <= PulseBounds::omega_hi);
    CHECK(delta >= PulseBounds::delta_lo);
    CHECK(delta <= PulseBounds::delta_hi);
    (void)rng;
  }
}

TEST_CASE("pulse validation rejects out-of-bounds knots") {
  CHECK_THROWS_AS(PulseSpec::from_vector({-1.0, 1e9, 1e9, 0.0, 0.0, 0.0}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(PulseSpec::from_vector({1e9, 1e9, 2.6e9, 0.0, 0.0, 0.0}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(PulseSpec::from_vector({1e9, 1e9, 1e9, -2.6e9, 0.0, 0.0}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(PulseSpec::from_vector({1e9, 1e9, 1e9, 0.0, 4.1e9, 0.0}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(PulseSpec::from_vector({1e9, 1e9, 1e9, 0.0, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(PulseSpec::from_vector({0.0, 2.5e9, 1e9, -2.5e9, 4.0e9, 0.0}).validate());
}

TEST_CASE("pulse vector round-trips exactly") {
  std::vector<double> th{0.3e9, 1.1e9, 0.9e9, -2.0e9, 3.3e9, 1.0e9};
  PulseSpec pulse = PulseSpec::from_vector(th);
  CHECK(pulse.to_vector() == th);
}

TEST_CASE("free functions mirror the class evaluations") {
  auto v = linear_knots();
  RampSpec spec = RampSpec::from_vector(v, 2.0);
  Ramp ramp(spec);
  CHECK(eval_ramp(spec, 0.7) == ramp(0.7));
  std::vector<double> th{1.0e9, 1.5e9, 0.7e9, 0.5e9, 1.0e9, -0.5e9};
  PulseSpec pulse = PulseSpec::from_vector(th);
  auto [w, d] = eval_pulse(pulse, 0.4e-6);
  auto [w2, d2] = pulse(0.4e-6);
  CHECK(w == w2);
  CHECK(d == d2);
}

TEST_CASE("quadratic through three points reproduces a parabola") {
  auto f = [](double t) { return 2.0 * t * t - 3.0 * t + 0.5; };
  for (double t : {-1.0, 0.0, 0.4, 1.7, 3.0})
    CHECK(quadratic_through(0.0, f(0.0), 1.0, f(1.0), 2.0, f(2.0), t) ==
          Approx(f(t)).margin(1e-12));
}

TEST_CASE("natural spline tracks a smooth function between knots") {
  // The natural end condition (zero curvature) is wrong for sin(2x) at x=1,
  // which costs ~1.8e-3 in a boundary layer; away from it the error is O(h^4).
  std::vector<double> xs, ys;
  for (int i = 0; i <= 10; ++i) {
    double x = i / 10.0;
    xs.push_back(x);
    ys.push_back(std::sin(2.0 * x));
  }
  CubicSpline s(xs, ys);
  for (int i = 0; i <= 100; ++i) {
    double x = i / 100.0;
    CHECK(s(x) == Approx(std::sin(2.0 * x)).margin(2.5e-3));
  }
  for (int i = 20; i <= 70; ++i) {
    double x = i / 100.0;
    CHECK(s(x) == Approx(std::sin(2.0 * x)).margin(1e-4));
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(s(xs[i]) == Approx(ys[i]).margin(1e-13));
}
