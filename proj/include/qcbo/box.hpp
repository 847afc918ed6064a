#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "qcbo/rng.hpp"

namespace qcbo {

// Axis-aligned search box; lo < hi required in every dimension.
struct Box {
  std::vector<double> lo, hi;

  Box() = default;
  Box(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
    validate();
  }
  static Box cube(double l, double h, std::size_t dim) {
    return Box(std::vector<double>(dim, l), std::vector<double>(dim, h));
  }

  std::size_t dim() const { return lo.size(); }

  void validate() const {
    if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("box: bad bounds");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) throw std::invalid_argument("box: lo >= hi");
  }

  std::vector<double> clamp(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
  }

  bool contains(const std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  std::vector<double> sample(Rng& rng) const {
    std::vector<double> x(dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = uniform(rng, lo[i], hi[i]);
    return x;
  }

  // Map to/from the unit cube; all kernels and step sizes operate there.
  std::vector<double> to_unit(const std::vector<double>& x) const {
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - lo[i]) / (hi[i] - lo[i]);
    return u;
  }
  std::vector<double> from_unit(const std::vector<double>& u) const {
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u[i];
    return x;
  }
};

}  // namespace qcbo
