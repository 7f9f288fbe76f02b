#pragma once
//! \file quotient.hpp
//  \brief Finite cyclic isometric actions on base and fiber, and the checks
//  needed before passing to the quotient (F x B)/G.
//
//  Both factors are handled in ambient Cartesian coordinates: the base as
//  R^{k+1} with dt^2 + a(t)^2 g_{S^k} written radially (t = |x|), the fiber as
//  the unit sphere in R^{m+1}. Generators are orthogonal matrices; the element
//  g^j acts diagonally on the product.

#include "ricsol/fixtures.hpp"
#include "ricsol/warped_geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ricsol {

enum class ActionKind { hopf, antipodal, axis_rotation };

inline const char* to_string(ActionKind kind) {
  switch (kind) {
  case ActionKind::hopf: return "hopf";
  case ActionKind::antipodal: return "antipodal";
  case ActionKind::axis_rotation: return "axis_rotation";
  }
  return "?";
}

inline ActionKind parse_action_kind(const std::string& s) {
  if (s == "hopf") return ActionKind::hopf;
  if (s == "antipodal") return ActionKind::antipodal;
  if (s == "axis_rotation") return ActionKind::axis_rotation;
  throw PreconditionError("unknown action kind '" + s + "' (expected hopf, antipodal or axis_rotation)");
}

struct SampleSpec {
  int base_count = 16;
  int fiber_count = 32;
  std::uint64_t seed = 20240917;
  double base_r_min = 0.5;
  double base_r_max = 3.0;
};

/// Cyclic group Z_p generated by (base_generator, fiber_generator).
struct GroupAction {
  int p = 2;
  ActionKind kind = ActionKind::antipodal;
  Matrix base_generator;
  Matrix fiber_generator;
  std::vector<Vector> base_samples;  ///< points of R^{k+1}, away from the origin
  std::vector<Vector> fiber_samples; ///< unit vectors of R^{m+1}

  int base_dim() const { return static_cast<int>(base_generator.rows()); }
  int fiber_dim() const { return static_cast<int>(fiber_generator.rows()); }

  /// g^1, ..., g^{p-1} of a generator.
  static std::vector<Matrix> nontrivial_powers(const Matrix& gen, int p) {
    std::vector<Matrix> out;
    Matrix acc = gen;
    for (int j = 1; j < p; ++j) {
      out.push_back(acc);
      acc = acc * gen;
    }
    return out;
  }
  std::vector<Matrix> base_elements() const { return nontrivial_powers(base_generator, p); }
  std::vector<Matrix> fiber_elements() const { return nontrivial_powers(fiber_generator, p); }

  /// max over both factors of |g^p - I| and |g^T g - I|.
  double group_law_residual() const {
    double worst = 0.0;
    for (const Matrix* g : {&base_generator, &fiber_generator}) {
      Matrix power = Matrix::Identity(g->rows(), g->cols());
      for (int j = 0; j < p; ++j) power = power * *g;
      const Matrix id = Matrix::Identity(g->rows(), g->cols());
      worst = std::max({worst, (power - id).norm(), (g->transpose() * *g - id).norm()});
    }
    return worst;
  }
};

namespace detail {

inline Matrix plane_rotation(int dim, int i, int j, double angle) {
  Matrix r = Matrix::Identity(dim, dim);
  r(i, i) = r(j, j) = std::cos(angle);
  r(i, j) = -std::sin(angle);
  r(j, i) = std::sin(angle);
  return r;
}

/// Orthonormal basis of ker(G - I), the fixed directions of G.
inline std::vector<Vector> fixed_directions(const Matrix& g, double tol = 1e-9) {
  const Matrix d = g - Matrix::Identity(g.rows(), g.cols());
  Eigen::JacobiSVD<Matrix> svd(d, Eigen::ComputeFullV);
  std::vector<Vector> out;
  const auto& s = svd.singularValues();
  for (Eigen::Index i = 0; i < d.cols(); ++i)
    if (i >= s.size() || s[i] <= tol) out.push_back(svd.matrixV().col(i));
  return out;
}

inline Vector random_direction(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-3);
  return v / v.norm();
}

} // namespace detail

/// Fiber samples: coordinate axes, fixed directions of every non-identity
/// element, then `count` random unit vectors.
inline std::vector<Vector> fiber_sample_set(const Matrix& generator, int p, int count, std::uint64_t seed) {
  const int dim = static_cast<int>(generator.rows());
  std::vector<Vector> out;
  for (int i = 0; i < dim; ++i)
    for (double s : {1.0, -1.0}) out.push_back(s * Vector::Unit(dim, i));
  for (const auto& g : GroupAction::nontrivial_powers(generator, p))
    for (const auto& v : detail::fixed_directions(g)) {
      out.push_back(v);
      out.push_back(-v);
    }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) out.push_back(detail::random_direction(dim, rng));
  return out;
}

inline std::vector<Vector> base_sample_set(int dim, const SampleSpec& spec) {
  std::vector<Vector> out;
  const double r_mid = 0.5 * (spec.base_r_min + spec.base_r_max);
  for (int i = 0; i < dim; ++i) out.push_back(r_mid * Vector::Unit(dim, i));
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> radius(spec.base_r_min, spec.base_r_max);
  for (int i = 0; i < spec.base_count; ++i) {
    const double r = radius(rng);
    out.push_back(r * detail::random_direction(dim, rng));
  }
  return out;
}

/// Z_p acting on R^{k+1} by a rotation of order p in the (x1, x2) plane (for
/// k = 0 only p = 2 exists: t -> -t), and on S^m by
///   hopf:          rotation by 2pi/p in every coordinate pair, m odd;
///   antipodal:     x -> -x, p = 2;
///   axis_rotation: rotation by 2pi/p in the (x1, x2) plane (not free for m >= 2).
inline GroupAction make_cyclic_action(int p, int k, int m, ActionKind kind, const SampleSpec& spec = {}) {
  if (p < 2) throw PreconditionError("cyclic action: order p must be >= 2");
  if (k < 0 || m < 1) throw PreconditionError("cyclic action: need k >= 0 and m >= 1");
  if (kind == ActionKind::hopf && m % 2 == 0)
    throw PreconditionError("hopf action needs an odd-dimensional sphere, got m = " + std::to_string(m));
  if (kind == ActionKind::antipodal && p != 2)
    throw PreconditionError("antipodal action has order 2, got p = " + std::to_string(p));
  if (k == 0 && p != 2) throw PreconditionError("the only non-trivial isometry of R fixing |t| has order 2");
  if (spec.base_count < 0 || spec.fiber_count < 0 || !(spec.base_r_min > 0.0) ||
      !(spec.base_r_max >= spec.base_r_min))
    throw PreconditionError("cyclic action: invalid sample specification");

  const double angle = 2.0 * std::numbers::pi / p;
  GroupAction a;
  a.p = p;
  a.kind = kind;
  a.base_generator = k == 0 ? Matrix(-Matrix::Identity(1, 1)) : detail::plane_rotation(k + 1, 0, 1, angle);
  switch (kind) {
  case ActionKind::hopf:
    a.fiber_generator = Matrix::Identity(m + 1, m + 1);
    for (int i = 0; i + 1 < m + 1; i += 2)
      a.fiber_generator = a.fiber_generator * detail::plane_rotation(m + 1, i, i + 1, angle);
    break;
  case ActionKind::antipodal: a.fiber_generator = -Matrix::Identity(m + 1, m + 1); break;
  case ActionKind::axis_rotation: a.fiber_generator = detail::plane_rotation(m + 1, 0, 1, angle); break;
  }
  a.base_samples = base_sample_set(k + 1, spec);
  a.fiber_samples = fiber_sample_set(a.fiber_generator, p, spec.fiber_count, spec.seed);
  return a;
}

struct Freeness {
  bool free = false;
  double margin = 0.0;
};

/// margin = min over g != e and fiber samples of |g x - x|.
inline Freeness is_free(const GroupAction& action, double tolerance = 1e-8) {
  if (action.fiber_samples.empty()) throw PreconditionError("is_free: empty fiber sample set");
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& g : action.fiber_elements())
    for (const auto& x : action.fiber_samples) margin = std::min(margin, (g * x - x).norm());
  return {margin > tolerance, margin};
}

/// max over elements and samples of |g^T G(g x) g - G(x)|, with G the patch metric.
inline double isometry_residual(std::span<const Matrix> elements, const MetricPatch& patch,
                                std::span<const Vector> samples) {
  double worst = 0.0;
  for (const auto& x : samples) {
    if (!patch.domain().contains(x)) throw PreconditionError("isometry_residual: sample outside the chart domain");
    const Matrix gx = patch.metric(x);
    for (const auto& g : elements) {
      const Vector y = g * x;
      if (!patch.domain().contains(y)) throw PreconditionError("isometry_residual: sample mapped outside the domain");
      worst = std::max(worst, (g.transpose() * patch.metric(y) * g - gx).norm());
    }
  }
  return worst;
}

/// max |u(g x) - u(x)| over elements and samples.
inline double invariance_deviation(const ScalarField& u, std::span<const Matrix> elements,
                                   std::span<const Vector> samples) {
  double worst = 0.0;
  for (const auto& x : samples)
    for (const auto& g : elements) worst = std::max(worst, std::abs(u(g * x) - u(x)));
  return worst;
}

/// Base and fiber of a radial warped product in ambient coordinates:
/// g_B = dt^2 + a(t)^2 g_{S^k} on R^{k+1}, the round sphere of radius R as
/// the unit sphere of R^{m+1} (radially extended), f = b(|x|), phi = phi(|x|).
struct AmbientWarped {
  MetricPatch base;
  MetricPatch fiber;
  ScalarField f;
  ScalarField phi;
};

inline AmbientWarped ambient_warped(int k, int m, std::function<double(double)> a, std::function<double(double)> b,
                                    std::function<double(double)> phi, double fiber_radius = 1.0,
                                    double half_width = 5.0) {
  if (!(fiber_radius > 0.0)) throw PreconditionError("ambient_warped: fiber radius must be positive");
  return {fixtures::radial_cartesian(k + 1, a, half_width, "R^" + std::to_string(k + 1) + " radial"),
          fixtures::radial_cartesian(
              m + 1, [fiber_radius](double) { return fiber_radius; }, 2.0, "S^" + std::to_string(m) + " ambient"),
          ScalarField{"b(|x|)", [b](const Vector& x) { return b(x.norm()); }},
          ScalarField{"phi(|x|)", [phi](const Vector& x) { return phi(x.norm()); }}};
}

inline constexpr int kQuotientSchemaVersion = 1;

struct QuotientOptions {
  double tolerance = 1e-10;
  double freeness_tolerance = 1e-8;
};

struct QuotientCertificate {
  int p = 0;
  ActionKind kind = ActionKind::antipodal;
  double freeness_margin = 0.0;
  double base_isometry = 0.0;
  double fiber_isometry = 0.0;
  double f_invariance = 0.0;
  double phi_invariance = 0.0;
  double group_law = 0.0;
  double diagonal_isometry = 0.0;
  double diagonal_margin = 0.0;
  std::size_t base_samples = 0;
  std::size_t fiber_samples = 0;
  std::size_t product_samples = 0;
  QuotientOptions options;

  bool free() const { return freeness_margin > options.freeness_tolerance; }
  bool passed() const {
    const double tol = options.tolerance;
    return free() && diagonal_margin > options.freeness_tolerance && base_isometry <= tol && fiber_isometry <= tol &&
           f_invariance <= tol && phi_invariance <= tol && group_law <= tol && diagonal_isometry <= tol;
  }

  nlohmann::json to_json() const {
    return {{"schema_version", kQuotientSchemaVersion},
            {"kind", "quotient_certificate"},
            {"action", {{"p", p}, {"fiber_action", to_string(kind)}}},
            {"freeness_margin", freeness_margin},
            {"free", free()},
            {"base_isometry_residual", base_isometry},
            {"fiber_isometry_residual", fiber_isometry},
            {"f_invariance_deviation", f_invariance},
            {"phi_invariance_deviation", phi_invariance},
            {"group_law_residual", group_law},
            {"diagonal_isometry_residual", diagonal_isometry},
            {"diagonal_freeness_margin", diagonal_margin},
            {"sample_counts", {{"base", base_samples}, {"fiber", fiber_samples}, {"product", product_samples}}},
            {"tolerance", options.tolerance},
            {"freeness_tolerance", options.freeness_tolerance},
            {"verdict", passed() ? "pass" : "fail"}};
  }
};

/// Hypothesis checks for (F x B)/G: free on F, isometric on both factors,
/// f and phi invariant, and the diagonal action is a fixed-point free isometry
/// of the assembled warped metric on sampled product points.
inline QuotientCertificate certify_quotient(const GroupAction& action, const AmbientWarped& geom,
                                            const QuotientOptions& opts = {}) {
  if (geom.base.dim() != action.base_dim() || geom.fiber.dim() != action.fiber_dim())
    throw PreconditionError("certify_quotient: action and geometry dimensions differ");
  if (!(opts.tolerance > 0.0) || !(opts.freeness_tolerance > 0.0))
    throw PreconditionError("certify_quotient: tolerances must be positive");

  QuotientCertificate c;
  c.p = action.p;
  c.kind = action.kind;
  c.options = opts;
  c.base_samples = action.base_samples.size();
  c.fiber_samples = action.fiber_samples.size();
  c.group_law = action.group_law_residual();
  c.freeness_margin = is_free(action, opts.freeness_tolerance).margin;

  const auto base_el = action.base_elements();
  const auto fiber_el = action.fiber_elements();
  c.base_isometry = isometry_residual(base_el, geom.base, action.base_samples);
  c.fiber_isometry = isometry_residual(fiber_el, geom.fiber, action.fiber_samples);
  c.f_invariance = invariance_deviation(geom.f, base_el, action.base_samples);
  c.phi_invariance = invariance_deviation(geom.phi, base_el, action.base_samples);

  const WarpedGeometry w{geom.base, geom.fiber, geom.f, geom.phi, SolitonConstants{0.0, geom.fiber.dim(), 0.0, 0.0}};
  const MetricPatch total = assemble_warped(w);
  const int n = geom.base.dim(), m = geom.fiber.dim();
  std::vector<Matrix> diagonal;
  for (std::size_t j = 0; j < base_el.size(); ++j) {
    Matrix d = Matrix::Zero(n + m, n + m);
    d.topLeftCorner(n, n) = base_el[j];
    d.bottomRightCorner(m, m) = fiber_el[j];
    diagonal.push_back(d);
  }
  std::vector<Vector> product;
  const std::size_t count = std::max(action.base_samples.size(), action.fiber_samples.size());
  for (std::size_t i = 0; i < count; ++i) {
    Vector x(n + m);
    x << action.base_samples[i % action.base_samples.size()], action.fiber_samples[i % action.fiber_samples.size()];
    product.push_back(x);
  }
  c.product_samples = product.size();
  c.diagonal_isometry = isometry_residual(diagonal, total, product);
  c.diagonal_margin = std::numeric_limits<double>::infinity();
  for (const auto& d : diagonal)
    for (const auto& x : product) c.diagonal_margin = std::min(c.diagonal_margin, (d * x - x).norm());
  return c;
}

} // namespace ricsol
