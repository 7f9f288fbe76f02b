#pragma once
//! \file interpolation.hpp
//  \brief Derivatives of gridded data and a C^2 piecewise-quintic interpolant.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ricsol {

/// Finite-difference weights for the `order`-th derivative at z from arbitrary
/// nodes (Fornberg's recursion). Returns one weight per node.
inline std::vector<double> fornberg_weights(double z, std::span<const double> nodes, int order) {
  const std::size_t n = nodes.size();
  if (n == 0 || order < 0 || static_cast<std::size_t>(order) >= n)
    throw std::invalid_argument("fornberg_weights: need more nodes than the derivative order");
  const auto m = static_cast<std::size_t>(order);
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

/// First derivative of gridded samples with a 5-point stencil (centred where
/// possible, one-sided at the ends). Fourth order on smooth data.
inline std::vector<double> grid_derivative(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw std::invalid_argument("grid_derivative: size mismatch");
  const std::size_t n = t.size();
  if (n < 5) throw std::invalid_argument("grid_derivative: need at least 5 samples");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = std::min(i >= 2 ? i - 2 : 0, n - 5);
    const auto w = fornberg_weights(t[i], t.subspan(start, 5), 1);
    double acc = 0.0;
    for (std::size_t s = 0; s < 5; ++s) acc += w[s] * (y[start + s] - y[i]);
    out[i] = acc;
  }
  return out;
}

/// Piecewise quintic Hermite interpolant matching value, first and second
/// derivative at every node (C^2 overall). Outside the node range the end
/// pieces are extended polynomially.
class QuinticHermite {
public:
  QuinticHermite() = default;
  QuinticHermite(std::vector<double> t, std::vector<double> y, std::vector<double> dy, std::vector<double> d2y)
      : t_(std::move(t)), y_(std::move(y)), dy_(std::move(dy)), d2y_(std::move(d2y)) {
    if (t_.size() < 2 || y_.size() != t_.size() || dy_.size() != t_.size() || d2y_.size() != t_.size())
      throw std::invalid_argument("QuinticHermite: need at least two nodes with matching data");
    for (std::size_t i = 1; i < t_.size(); ++i)
      if (!(t_[i] > t_[i - 1])) throw std::invalid_argument("QuinticHermite: nodes must increase strictly");
  }

  double front() const { return t_.front(); }
  double back() const { return t_.back(); }

  double operator()(double t) const {
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    i = std::min(i, t_.size() - 2);
    const double dt = t_[i + 1] - t_[i];
    const double s = (t - t_[i]) / dt;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    const double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    const double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    const double h3 = 0.5 * (s3 - 2 * s4 + s5);
    const double h4 = -4 * s3 + 7 * s4 - 3 * s5;
    const double h5 = 10 * s3 - 15 * s4 + 6 * s5;
    return y_[i] * h0 + dt * dy_[i] * h1 + dt * dt * d2y_[i] * h2 + dt * dt * d2y_[i + 1] * h3 +
           dt * dy_[i + 1] * h4 + y_[i + 1] * h5;
  }

private:
  std::vector<double> t_, y_, dy_, d2y_;
};

} // namespace ricsol
