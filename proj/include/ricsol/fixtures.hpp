#pragma once
//! \file fixtures.hpp
//  \brief Closed-form metric patches used as inputs and test fixtures.

#include "ricsol/tensor_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ricsol::fixtures {

/// Euclidean metric on the cube [-half_width, half_width]^dim.
inline MetricPatch flat(int dim, double half_width = 10.0) {
  return MetricPatch("flat R^" + std::to_string(dim), Domain::cube(dim, half_width),
                     [dim](const Vector&) -> Matrix { return Matrix::Identity(dim, dim); });
}

/// Flat m-torus in periodic coordinates, side length `period`.
inline MetricPatch flat_torus(int m, double period = 2.0 * std::numbers::pi) {
  return MetricPatch("flat T^" + std::to_string(m), Domain::box(Vector::Zero(m), Vector::Constant(m, period)),
                     [m](const Vector&) -> Matrix { return Matrix::Identity(m, m); });
}

/// dt^2 + t^2 dtheta^2 on t in (0, t_max], theta in [-pi, pi]; t = 0 is singular.
inline MetricPatch polar_plane(double t_max = 4.0) {
  Vector lo(2), hi(2);
  lo << 0.0, -std::numbers::pi;
  hi << t_max, std::numbers::pi;
  auto domain = Domain::box(lo, hi);
  domain.mark_singular(0, true, false);
  return MetricPatch("polar plane", std::move(domain), [](const Vector& x) -> Matrix {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = x[0] * x[0];
    return g;
  });
}

namespace detail {

/// Diagonal of the unit round metric on S^k in hyperspherical angles
/// (theta_1, ..., theta_k): w_1 = 1, w_{i+1} = w_i sin^2(theta_i).
inline Vector sphere_weights(const Vector& angles) {
  Vector w(angles.size());
  double acc = 1.0;
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    w[i] = acc;
    const double s = std::sin(angles[i]);
    acc *= s * s;
  }
  return w;
}

/// Angle box for S^k: theta_i in [0, pi] (singular ends) for i < k, last angle in [-pi, pi].
inline Domain sphere_angle_domain(int k) {
  Vector lo(k), hi(k);
  for (int i = 0; i < k; ++i) {
    lo[i] = (i + 1 < k) ? 0.0 : -std::numbers::pi;
    hi[i] = std::numbers::pi;
  }
  auto d = Domain::box(lo, hi);
  for (int i = 0; i + 1 < k; ++i) d.mark_singular(i, true, true);
  return d;
}

} // namespace detail

/// Round S^m of the given radius in hyperspherical coordinates; Ric = ((m-1)/r^2) g.
inline MetricPatch round_sphere(int m, double radius = 1.0) {
  if (m < 1) throw PreconditionError("round_sphere: dimension must be >= 1");
  const double r2 = radius * radius;
  return MetricPatch("round S^" + std::to_string(m) + " (r=" + std::to_string(radius) + ")",
                     detail::sphere_angle_domain(m), [r2](const Vector& x) -> Matrix {
                       return Matrix((r2 * detail::sphere_weights(x)).asDiagonal());
                     });
}

/// Upper half-space model of hyperbolic m-space with curvature -1/radius^2,
/// so Ric = -((m-1)/radius^2) g. Last coordinate in [0.25, 4].
inline MetricPatch hyperbolic_space(int m, double radius = 1.0) {
  if (m < 1) throw PreconditionError("hyperbolic_space: dimension must be >= 1");
  Vector lo = Vector::Constant(m, -4.0), hi = Vector::Constant(m, 4.0);
  lo[m - 1] = 0.25;
  const double r2 = radius * radius;
  return MetricPatch("hyperbolic H^" + std::to_string(m), Domain::box(lo, hi), [m, r2](const Vector& x) -> Matrix {
    const double y = x[m - 1];
    return Matrix::Identity(m, m) * (r2 / (y * y));
  });
}

/// Rotationally symmetric metric dt^2 + a(t)^2 g_{S^k} in (t, theta_1..theta_k),
/// t in [0, t_max] with t = 0 flagged singular. k = 0 gives the line dt^2.
template <class Radius>
MetricPatch radial_warped_chart(int k, Radius a, double t_min, double t_max, std::string label) {
  Vector lo(k + 1), hi(k + 1);
  lo[0] = t_min;
  hi[0] = t_max;
  if (k > 0) {
    const auto angles = detail::sphere_angle_domain(k);
    lo.tail(k) = angles.lower();
    hi.tail(k) = angles.upper();
  }
  auto domain = Domain::box(lo, hi);
  if (t_min <= 0.0) domain.mark_singular(0, true, false);
  for (int i = 0; i + 1 < k; ++i) domain.mark_singular(i + 1, true, true);
  return MetricPatch(std::move(label), std::move(domain), [k, a](const Vector& x) -> Matrix {
    Matrix g = Matrix::Zero(k + 1, k + 1);
    g(0, 0) = 1.0;
    if (k > 0) {
      const double at = a(x[0]);
      g.bottomRightCorner(k, k) = (at * at * detail::sphere_weights(x.tail(k))).asDiagonal();
    }
    return g;
  });
}

/// The same kind of metric written in Cartesian coordinates of R^dim:
///   g = P + (a(r)/r)^2 (I - P),   P = x x^T / r^2.
/// Orthogonal linear maps are exact isometries of it. Evaluation needs r > 0.
template <class Radius>
MetricPatch radial_cartesian(int dim, Radius a, double half_width, std::string label) {
  return MetricPatch(std::move(label), Domain::cube(dim, half_width), [dim, a](const Vector& x) -> Matrix {
    const double r = x.norm();
    if (!(r > 0.0)) throw DegenerateMetricError("radial_cartesian: metric undefined at the origin");
    if (dim == 1) return Matrix::Identity(1, 1);
    const Matrix radial = x * x.transpose() / (r * r);
    const double ratio = a(r) / r;
    return radial + ratio * ratio * (Matrix::Identity(dim, dim) - radial);
  });
}

} // namespace ricsol::fixtures
