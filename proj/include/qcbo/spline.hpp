#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qcbo {

// Natural cubic spline interpolant (zero second derivative at both ends).
// Knot abscissae must be strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> xs, std::vector<double> ys)
      : x_(std::move(xs)), y_(std::move(ys)) {
    std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("spline: bad knots");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("spline: knots not increasing");
    m_.assign(n, 0.0);
    if (n == 2) return;
    // tridiagonal system for interior second derivatives
    std::vector<double> b(n, 1.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      double a = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      r[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
      double f = a / b[i - 1];
      b[i] -= f * c[i - 1];
      r[i] -= f * r[i - 1];
    }
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
  }

  double operator()(double t) const {
    std::size_t n = x_.size(), lo = 0, hi = n - 1;
    if (t <= x_.front()) {
      hi = 1;
    } else if (t >= x_.back()) {
      lo = n - 2;
    } else {
      while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (x_[mid] <= t ? lo : hi) = mid;
      }
    }
    double h = x_[hi] - x_[lo];
    double a = (x_[hi] - t) / h, b = (t - x_[lo]) / h;
    return a * y_[lo] + b * y_[hi] +
           ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_, m_;
};

// Unique parabola through three points, evaluated by Lagrange form.
inline double quadratic_through(double x1, double y1, double x2, double y2, double x3, double y3,
                                double t) {
  double l1 = (t - x2) * (t - x3) / ((x1 - x2) * (x1 - x3));
  double l2 = (t - x1) * (t - x3) / ((x2 - x1) * (x2 - x3));
  double l3 = (t - x1) * (t - x2) / ((x3 - x1) * (x3 - x2));
  return y1 * l1 + y2 * l2 + y3 * l3;
}

}  // namespace qcbo
