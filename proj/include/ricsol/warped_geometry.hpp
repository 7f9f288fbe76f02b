#pragma once
//! \file warped_geometry.hpp
//  \brief Warped metrics g_B + f^2 g_F on a product chart, their block Ricci
//  curvature in closed form, and the structure equations that make the total
//  space a gradient Ricci soliton.
//
//  With n = dim B, m = dim F and f > 0 on the base:
//
//    Ric(X, Y) = Ric_B(X, Y) - (m / f) Hess f (X, Y)
//    Ric(X, U) = 0
//    Ric(U, V) = Ric_F(U, V) - [f Lap f + (m - 1) |grad f|^2] g_F(U, V)
//
//  The vertical block is written against the *unwarped* fiber metric g_F, i.e.
//  as plain coordinate components in the fiber chart. Against the induced
//  fiber metric f^2 g_F the bracket would be divided by f^2. Base quantities
//  (Hess f, Lap f, grad f) are computed on the base patch alone.
//
//  Given Ric_F = mu g_F, the total space with potential phi o pi solves
//  Ric + Hess = lambda g exactly when
//
//    Ric_B + Hess phi = lambda g_B + (m / f) Hess f
//    2 lambda phi - |grad phi|^2 + Lap phi + (m / f) <grad phi, grad f> = c
//
//  and mu equals lambda f^2 + f Lap f + (m - 1)|grad f|^2 - f <grad phi, grad f>,
//  which is constant on solutions of the first two.

#include "ricsol/tensor_core.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ricsol {

struct WarpedGeometry {
  MetricPatch base;
  MetricPatch fiber;
  ScalarField f;   ///< warping function on the base, > 0
  ScalarField phi; ///< potential on the base; the total-space potential is phi o pi
  SolitonConstants constants;

  int base_dim() const { return base.dim(); }
  int fiber_dim() const { return fiber.dim(); }
  int dim() const { return base.dim() + fiber.dim(); }

  Vector base_point(const Vector& x) const { return x.head(base.dim()); }
  Vector fiber_point(const Vector& x) const { return x.tail(fiber.dim()); }
};

/// Checks constants.m == dim F and f > 0 on a 3^n lattice of the base box.
inline void validate(const WarpedGeometry& w) {
  if (w.constants.m != w.fiber.dim())
    throw PreconditionError("warped geometry: constants.m = " + std::to_string(w.constants.m) +
                            " but fiber has dimension " + std::to_string(w.fiber.dim()));
  if (w.constants.m < 1) throw PreconditionError("warped geometry: fiber dimension must be >= 1");
  const Domain& d = w.base.domain();
  const int n = d.dim();
  const int lattice = static_cast<int>(std::pow(3, n));
  for (int code = 0; code < lattice; ++code) {
    Vector z(n);
    int rest = code;
    for (int i = 0; i < n; ++i) {
      const double frac = 0.25 * (1 + rest % 3);
      rest /= 3;
      z[i] = d.lower()[i] + frac * (d.upper()[i] - d.lower()[i]);
    }
    const Vector x = d.from_box(z);
    const double fx = w.f(x);
    if (!(fx > 0.0))
      throw PreconditionError("warping function '" + w.f.label + "' is not positive at a sampled base point");
  }
}

/// The n+m dimensional patch with metric blockdiag(g_B(x_B), f(x_B)^2 g_F(x_F)).
inline MetricPatch assemble_warped(const WarpedGeometry& w) {
  validate(w);
  const int n = w.base.dim(), m = w.fiber.dim();
  auto g = [base = w.base, fiber = w.fiber, f = w.f, n, m](const Vector& x) -> Matrix {
    const Vector xb = x.head(n);
    const double fx = f(xb);
    if (!(fx > 0.0)) throw DegenerateMetricError("warping function is not positive");
    Matrix out = Matrix::Zero(n + m, n + m);
    out.topLeftCorner(n, n) = base.metric(xb);
    out.bottomRightCorner(m, m) = fx * fx * fiber.metric(x.tail(m));
    return out;
  };
  return MetricPatch(w.base.label() + " x_f " + w.fiber.label(), w.base.domain().product(w.fiber.domain()),
                     std::move(g));
}

/// psi = phi o pi on the assembled chart.
inline ScalarField lifted_potential(const WarpedGeometry& w) {
  return {w.phi.label + " o pi", [phi = w.phi, n = w.base.dim()](const Vector& x) { return phi(x.head(n)); }};
}

struct BlockMatrix {
  Matrix HH; ///< horizontal, n x n
  Matrix VV; ///< vertical, m x m, components in fiber coordinates
  Matrix HV; ///< mixed, n x m

  Matrix assemble() const {
    const auto n = HH.rows(), m = VV.rows();
    Matrix out(n + m, n + m);
    out.topLeftCorner(n, n) = HH;
    out.topRightCorner(n, m) = HV;
    out.bottomLeftCorner(m, n) = HV.transpose();
    out.bottomRightCorner(m, m) = VV;
    return out;
  }

  static BlockMatrix split(const Matrix& full, int n) {
    const auto m = full.rows() - n;
    return {full.topLeftCorner(n, n), full.bottomRightCorner(m, m), full.topRightCorner(n, m)};
  }
};

/// Block Ricci tensor of the warped metric from base and fiber data only.
inline BlockMatrix ricci_closed_form(const WarpedGeometry& w, const Vector& x, double h = kDefaultStep) {
  const int n = w.base.dim(), m = w.fiber.dim();
  if (x.size() != n + m) throw PreconditionError("ricci_closed_form: point has wrong dimension");
  const Vector xb = w.base_point(x), xf = w.fiber_point(x);
  const double fx = w.f(xb);
  if (!(fx > 0.0)) throw PreconditionError("ricci_closed_form: warping function not positive");

  const Matrix hess_f = hessian_fd(w.base, w.f, xb, h);
  const auto gl = gradient_laplacian(w.base, w.f, xb, h);
  BlockMatrix out;
  out.HH = ricci_fd(w.base, xb, h) - (m / fx) * hess_f;
  out.HV = Matrix::Zero(n, m);
  out.VV = ricci_fd(w.fiber, xf, h) -
           (fx * gl.laplacian + (m - 1) * gl.gradient_norm_sq) * w.fiber.metric(xf);
  return out;
}

/// Ric_B + Hess phi - lambda g_B - (m/f) Hess f at a base point.
inline MatrixResidual base_equation_residual(const WarpedGeometry& w, const Vector& xb, double h = kDefaultStep) {
  const double fx = w.f(xb);
  if (!(fx > 0.0)) throw PreconditionError("base_equation_residual: warping function not positive");
  MatrixResidual r;
  r.value = ricci_fd(w.base, xb, h) + hessian_fd(w.base, w.phi, xb, h) - w.constants.lambda * w.base.metric(xb) -
            (w.constants.m / fx) * hessian_fd(w.base, w.f, xb, h);
  r.norm = r.value.norm();
  return r;
}

/// Left side of the scalar equation, 2 lambda phi - |grad phi|^2 + Lap phi + (m/f) grad phi(f).
inline double scalar_equation_lhs(const WarpedGeometry& w, const Vector& xb, double h = kDefaultStep) {
  const double fx = w.f(xb);
  if (!(fx > 0.0)) throw PreconditionError("scalar_equation: warping function not positive");
  const auto gphi = gradient_laplacian(w.base, w.phi, xb, h);
  const auto gf = gradient_laplacian(w.base, w.f, xb, h);
  const double cross = gphi.gradient.dot(gf.differential);
  return 2.0 * w.constants.lambda * w.phi(xb) - gphi.gradient_norm_sq + gphi.laplacian +
         (w.constants.m / fx) * cross;
}

inline double scalar_equation_residual(const WarpedGeometry& w, const Vector& xb, double h = kDefaultStep) {
  return scalar_equation_lhs(w, xb, h) - w.constants.c;
}

struct ScalarCalibration {
  double c = 0.0;      ///< mean of the left side over the samples
  double spread = 0.0; ///< max - min of the left side
};

/// Calibrate mode: c is an output fixed by the normalization of phi.
inline ScalarCalibration calibrate_scalar_constant(const WarpedGeometry& w, std::span<const Vector> base_samples,
                                                   double h = kDefaultStep) {
  if (base_samples.empty()) throw PreconditionError("calibrate_scalar_constant: no samples");
  double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& xb : base_samples) {
    const double v = scalar_equation_lhs(w, xb, h);
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {sum / static_cast<double>(base_samples.size()), hi - lo};
}

/// lambda f^2 + f Lap f + (m-1)|grad f|^2 - f grad phi(f) at a base point.
inline double first_integral(const WarpedGeometry& w, const Vector& xb, double h = kDefaultStep) {
  const double fx = w.f(xb);
  if (!(fx > 0.0)) throw PreconditionError("first_integral: warping function not positive");
  const auto gf = gradient_laplacian(w.base, w.f, xb, h);
  const auto gphi = gradient_laplacian(w.base, w.phi, xb, h);
  return w.constants.lambda * fx * fx + fx * gf.laplacian + (w.constants.m - 1) * gf.gradient_norm_sq -
         fx * gphi.gradient.dot(gf.differential);
}

/// max over samples of ||Ric_F - mu g_F||.
inline double einstein_check(const MetricPatch& fiber, double mu, std::span<const Vector> samples,
                             double h = kDefaultStep) {
  double worst = 0.0;
  for (const auto& x : samples) worst = std::max(worst, (ricci_fd(fiber, x, h) - mu * fiber.metric(x)).norm());
  return worst;
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

inline constexpr int kReportSchemaVersion = 1;

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::size_t sample_count = 0;
  bool passed = false;
};

struct CertificationReport {
  std::vector<CheckResult> checks;
  double lambda = 0.0;
  double mu = 0.0;        ///< mean first integral over the samples
  double mu_spread = 0.0; ///< max - min of the first integral
  double c = 0.0;

  bool passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  void add(std::string name, double residual, double tolerance, std::size_t samples) {
    checks.push_back({std::move(name), residual, tolerance, samples, residual <= tolerance});
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = "soliton_certificate";
    j["lambda"] = lambda;
    j["classification"] = to_string(classify(lambda));
    j["mu"] = mu;
    j["mu_spread"] = mu_spread;
    j["c"] = c;
    j["checks"] = nlohmann::json::array();
    for (const auto& chk : checks)
      j["checks"].push_back({{"name", chk.name},
                             {"max_residual", chk.max_residual},
                             {"tolerance", chk.tolerance},
                             {"sample_count", chk.sample_count},
                             {"verdict", chk.passed ? "pass" : "fail"}});
    j["verdict"] = passed() ? "pass" : "fail";
    return j;
  }
};

struct CertifyOptions {
  double tolerance = 1e-6;
  double h = kDefaultStep;
};

/// Runs every hypothesis of the warped soliton construction on the samples and
/// then the soliton equation itself on the assembled chart.
///
/// Checks: base_equation, scalar_equation (against constants.c),
/// first_integral_spread (relative to 1 + |mu|), fiber_constant
/// (|mean mu - constants.mu|), einstein_fiber (with the measured mu) and
/// soliton_residual (Ric + Hess(phi o pi) - lambda g on the full chart).
inline CertificationReport certify_soliton(const WarpedGeometry& w, std::span<const Vector> product_samples,
                                           const CertifyOptions& opts = {}) {
  if (product_samples.empty()) throw PreconditionError("certify_soliton: no samples");
  const MetricPatch total = assemble_warped(w);
  const ScalarField psi = lifted_potential(w);
  const double h = opts.h, tol = opts.tolerance;

  std::vector<Vector> base_pts, fiber_pts;
  for (const auto& x : product_samples) {
    base_pts.push_back(w.base_point(x));
    fiber_pts.push_back(w.fiber_point(x));
  }

  CertificationReport report;
  report.lambda = w.constants.lambda;
  report.c = w.constants.c;

  double base_worst = 0.0, scalar_worst = 0.0, mu_sum = 0.0;
  double mu_lo = std::numeric_limits<double>::infinity(), mu_hi = -mu_lo;
  for (const auto& xb : base_pts) {
    base_worst = std::max(base_worst, base_equation_residual(w, xb, h).norm);
    scalar_worst = std::max(scalar_worst, std::abs(scalar_equation_residual(w, xb, h)));
    const double mu = first_integral(w, xb, h);
    mu_sum += mu;
    mu_lo = std::min(mu_lo, mu);
    mu_hi = std::max(mu_hi, mu);
  }
  const auto count = base_pts.size();
  report.mu = mu_sum / static_cast<double>(count);
  report.mu_spread = mu_hi - mu_lo;
  const double mu_scale = 1.0 + std::abs(report.mu);

  report.add("base_equation", base_worst, tol, count);
  report.add("scalar_equation", scalar_worst, tol, count);
  report.add("first_integral_spread", report.mu_spread, tol * mu_scale, count);
  report.add("fiber_constant", std::abs(report.mu - w.constants.mu), tol * mu_scale, count);
  report.add("einstein_fiber", einstein_check(w.fiber, report.mu, fiber_pts, h), tol, count);

  double total_worst = 0.0;
  for (const auto& x : product_samples)
    total_worst = std::max(total_worst, soliton_residual(total, psi, w.constants.lambda, x, h).norm);
  report.add("soliton_residual", total_worst, tol, count);
  return report;
}

} // namespace ricsol
