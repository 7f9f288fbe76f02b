#pragma once
//! \file tensor_core.hpp
//  \brief Coordinate-patch differential geometry by finite differences.
//
//  A MetricPatch is a single chart: an affine box domain plus a callable that
//  returns the metric components at any point of the box. Christoffel symbols,
//  Ricci, Hessian, gradient and Laplacian are computed with fourth-order central
//  stencils. Everything here is a pure function of its inputs, so patches can
//  be shared between threads freely.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ricsol {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Query point too close to the chart boundary (or to a coordinate singularity).
class BoundaryProximityError : public GeometryError {
public:
  using GeometryError::GeometryError;
};

/// Metric not positive definite, or too ill-conditioned to difference.
class DegenerateMetricError : public GeometryError {
public:
  using GeometryError::GeometryError;
};

class PreconditionError : public GeometryError {
public:
  using GeometryError::GeometryError;
};

/// Default finite-difference step for unit-scaled charts.
inline constexpr double kDefaultStep = 1e-3;
/// Largest metric condition number accepted at a query point.
inline constexpr double kMaxMetricCondition = 1e10;
/// Queries keep this many steps away from faces that carry a coordinate singularity.
inline constexpr double kSingularClearanceSteps = 10.0;

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

/// Chart domain {x : lower <= map*x + offset <= upper}.
///
/// A plain box has map = I, offset = 0. Linear chart changes only update map,
/// so pulled-back patches keep an exact description of their domain. Faces can
/// be flagged as coordinate singularities (poles, r = 0), which raises the
/// required clearance to kSingularClearanceSteps * h.
class Domain {
public:
  Domain() = default;

  static Domain box(Vector lower, Vector upper) {
    if (lower.size() != upper.size() || lower.size() == 0)
      throw PreconditionError("Domain::box: bounds must be non-empty and of equal size");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (!(lower[i] < upper[i]))
        throw PreconditionError("Domain::box: empty interval on axis " + std::to_string(i));
    Domain d;
    const auto n = lower.size();
    d.lower_ = std::move(lower);
    d.upper_ = std::move(upper);
    d.map_ = Matrix::Identity(n, n);
    d.offset_ = Vector::Zero(n);
    d.singular_lower_.assign(static_cast<std::size_t>(n), false);
    d.singular_upper_.assign(static_cast<std::size_t>(n), false);
    return d;
  }

  static Domain cube(int dim, double half_width) {
    return box(Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width));
  }

  Domain& mark_singular(int axis, bool lower_face, bool upper_face) {
    singular_lower_.at(static_cast<std::size_t>(axis)) = singular_lower_[axis] || lower_face;
    singular_upper_.at(static_cast<std::size_t>(axis)) = singular_upper_[axis] || upper_face;
    return *this;
  }

  int dim() const { return static_cast<int>(map_.cols()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Matrix& map() const { return map_; }
  const Vector& offset() const { return offset_; }
  bool singular_lower(int axis) const { return singular_lower_[static_cast<std::size_t>(axis)]; }
  bool singular_upper(int axis) const { return singular_upper_[static_cast<std::size_t>(axis)]; }

  /// Domain of the chart y with x = A*y.
  Domain pulled_back(const Matrix& A) const {
    Domain d = *this;
    d.map_ = map_ * A;
    return d;
  }

  /// Product domain (this chart's coordinates first).
  Domain product(const Domain& other) const {
    Domain d;
    const auto n = lower_.size(), m = other.lower_.size();
    d.lower_.resize(n + m);
    d.lower_ << lower_, other.lower_;
    d.upper_.resize(n + m);
    d.upper_ << upper_, other.upper_;
    d.offset_.resize(n + m);
    d.offset_ << offset_, other.offset_;
    d.map_ = Matrix::Zero(n + m, map_.cols() + other.map_.cols());
    d.map_.topLeftCorner(n, map_.cols()) = map_;
    d.map_.bottomRightCorner(m, other.map_.cols()) = other.map_;
    d.singular_lower_ = singular_lower_;
    d.singular_lower_.insert(d.singular_lower_.end(), other.singular_lower_.begin(), other.singular_lower_.end());
    d.singular_upper_ = singular_upper_;
    d.singular_upper_.insert(d.singular_upper_.end(), other.singular_upper_.begin(), other.singular_upper_.end());
    return d;
  }

  bool contains(const Vector& x) const { return clearance_violation(x, 0.0, 0.0).empty(); }

  /// Chart point from box coordinates z (requires an invertible map).
  Vector from_box(const Vector& z) const { return map_.fullPivLu().solve(z - offset_); }

  /// Throws BoundaryProximityError unless every face is at least `reach` away
  /// (and singular faces at least max(reach, 10h)), measured in chart coordinates.
  void require_clearance(const Vector& x, double reach, double h) const {
    if (x.size() != dim())
      throw PreconditionError("point has dimension " + std::to_string(x.size()) + ", chart has " +
                              std::to_string(dim()));
    if (auto msg = clearance_violation(x, reach, h); !msg.empty()) throw BoundaryProximityError(msg);
  }

private:
  std::string clearance_violation(const Vector& x, double reach, double h) const {
    const Vector z = map_ * x + offset_;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double scale = map_.row(j).norm();
      const double lo = (z[j] - lower_[j]) / scale;
      const double hi = (upper_[j] - z[j]) / scale;
      const double singular_reach = std::max(reach, kSingularClearanceSteps * h);
      const double need_lo = singular_lower_[static_cast<std::size_t>(j)] ? singular_reach : reach;
      const double need_hi = singular_upper_[static_cast<std::size_t>(j)] ? singular_reach : reach;
      if (!(lo >= need_lo) || !(hi >= need_hi)) {
        std::ostringstream os;
        os << "point too close to domain face " << j << " (distance " << std::min(lo, hi) << ", need "
           << (lo < need_lo ? need_lo : need_hi) << ")";
        return os.str();
      }
    }
    return {};
  }

  Vector lower_, upper_;
  Matrix map_;
  Vector offset_;
  std::vector<bool> singular_lower_, singular_upper_;
};

// ---------------------------------------------------------------------------
// Patches and fields
// ---------------------------------------------------------------------------

class MetricPatch {
public:
  using MetricFn = std::function<Matrix(const Vector&)>;

  MetricPatch(std::string label, Domain domain, MetricFn g)
      : label_(std::move(label)), domain_(std::move(domain)), g_(std::move(g)) {
    if (!g_) throw PreconditionError("MetricPatch '" + label_ + "': empty metric function");
  }

  int dim() const { return domain_.dim(); }
  const std::string& label() const { return label_; }
  const Domain& domain() const { return domain_; }

  Matrix metric(const Vector& x) const {
    Matrix g = g_(x);
    if (g.rows() != dim() || g.cols() != dim())
      throw PreconditionError("MetricPatch '" + label_ + "': metric has wrong shape");
    return g;
  }

private:
  std::string label_;
  Domain domain_;
  MetricFn g_;
};

struct ScalarField {
  std::string label;
  std::function<double(const Vector&)> fn;

  double operator()(const Vector& x) const { return fn(x); }

  static ScalarField constant(double value, std::string label = "constant") {
    return {std::move(label), [value](const Vector&) { return value; }};
  }
};

enum class SolitonType { shrinking, steady, expanding };

inline SolitonType classify(double lambda) {
  if (lambda > 0) return SolitonType::shrinking;
  if (lambda < 0) return SolitonType::expanding;
  return SolitonType::steady;
}

inline const char* to_string(SolitonType type) {
  switch (type) {
  case SolitonType::shrinking: return "shrinking";
  case SolitonType::steady: return "steady";
  case SolitonType::expanding: return "expanding";
  }
  return "unknown";
}

/// Scalars of the soliton system: Ric + Hess(psi) = lambda g on the total
/// space, Ric_F = mu g_F on the fiber, c the constant of the scalar equation.
struct SolitonConstants {
  double lambda = 0.0;
  int m = 1;
  double mu = 0.0;
  double c = 0.0;

  SolitonType type() const { return classify(lambda); }
};

// ---------------------------------------------------------------------------
// Finite-difference stencils
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::array<double, 4> kFirstOffsets{-2.0, -1.0, 1.0, 2.0};
inline constexpr std::array<double, 4> kFirstWeights{1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
inline constexpr std::array<double, 5> kSecondOffsets{-2.0, -1.0, 0.0, 1.0, 2.0};
inline constexpr std::array<double, 5> kSecondWeights{-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0,
                                                      -1.0 / 12.0};

inline Vector shifted(const Vector& x, int axis, double delta) {
  Vector y = x;
  y[axis] += delta;
  return y;
}

/// Fourth-order d/dx_axis of fn (double- or matrix-valued).
template <class Fn>
auto first_derivative(const Fn& fn, const Vector& x, int axis, double h) {
  using Result = std::decay_t<decltype(fn(x))>;
  Result acc = kFirstWeights[0] * fn(shifted(x, axis, kFirstOffsets[0] * h));
  for (std::size_t s = 1; s < kFirstOffsets.size(); ++s)
    acc += kFirstWeights[s] * fn(shifted(x, axis, kFirstOffsets[s] * h));
  return Result(acc / h);
}

/// Fourth-order d^2/(dx_i dx_j) of a scalar function.
template <class Fn>
double second_derivative(const Fn& fn, const Vector& x, int i, int j, double h) {
  if (i == j) {
    double acc = 0.0;
    for (std::size_t s = 0; s < kSecondOffsets.size(); ++s)
      acc += kSecondWeights[s] * fn(shifted(x, i, kSecondOffsets[s] * h));
    return acc / (h * h);
  }
  double acc = 0.0;
  for (std::size_t s = 0; s < kFirstOffsets.size(); ++s) {
    const Vector xi = shifted(x, i, kFirstOffsets[s] * h);
    for (std::size_t r = 0; r < kFirstOffsets.size(); ++r)
      acc += kFirstWeights[s] * kFirstWeights[r] * fn(shifted(xi, j, kFirstOffsets[r] * h));
  }
  return acc / (h * h);
}

inline void require_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("finite-difference step must be positive");
}

} // namespace detail

/// Inverse of a symmetric positive-definite metric via LDLT.
///
/// Rejects non-positive-definite matrices and condition numbers above
/// `max_condition`.
inline Matrix inverse_metric(const Matrix& g, double max_condition = kMaxMetricCondition) {
  if (!g.allFinite()) throw DegenerateMetricError("metric has non-finite components");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw DegenerateMetricError("metric is not positive definite");
  if (hi / lo > max_condition) throw DegenerateMetricError("metric condition number exceeds limit");
  return g.ldlt().solve(Matrix::Identity(g.rows(), g.cols()));
}

/// Gamma^i_{jk}, stored as upper[i](j, k).
struct Christoffel {
  std::vector<Matrix> upper;

  double operator()(int i, int j, int k) const { return upper[static_cast<std::size_t>(i)](j, k); }
  int dim() const { return static_cast<int>(upper.size()); }
};

namespace detail {

inline std::vector<Matrix> metric_derivatives(const MetricPatch& patch, const Vector& x, double h) {
  std::vector<Matrix> dg;
  dg.reserve(static_cast<std::size_t>(patch.dim()));
  const auto g = [&patch](const Vector& y) { return patch.metric(y); };
  for (int k = 0; k < patch.dim(); ++k) dg.push_back(first_derivative(g, x, k, h));
  return dg;
}

inline Christoffel christoffel_unchecked(const MetricPatch& patch, const Vector& x, double h) {
  const int n = patch.dim();
  const Matrix ginv = inverse_metric(patch.metric(x));
  const auto dg = metric_derivatives(patch, x, h);
  // lowered(l)(j,k) = Gamma_{l j k} = 1/2 (d_j g_lk + d_k g_lj - d_l g_jk)
  Christoffel out;
  out.upper.assign(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      Vector lowered(n);
      for (int l = 0; l < n; ++l) lowered[l] = 0.5 * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
      const Vector raised = ginv * lowered;
      for (int i = 0; i < n; ++i) {
        out.upper[i](j, k) = raised[i];
        out.upper[i](k, j) = raised[i];
      }
    }
  return out;
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

} // namespace detail

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Levi-Civita connection coefficients at x. Requires 2h clearance.
inline Christoffel christoffel(const MetricPatch& patch, const Vector& x, double h = kDefaultStep) {
  detail::require_step(h);
  patch.domain().require_clearance(x, 2.0 * h, h);
  return detail::christoffel_unchecked(patch, x, h);
}

/// Ricci tensor by differencing the Christoffel symbols. Requires 4h clearance.
///
///   R_jk = d_i G^i_jk - d_j G^i_ik + G^i_ip G^p_jk - G^i_jp G^p_ik
inline Matrix ricci_fd(const MetricPatch& patch, const Vector& x, double h = kDefaultStep) {
  detail::require_step(h);
  patch.domain().require_clearance(x, 4.0 * h, h);
  const int n = patch.dim();
  const Christoffel gamma = detail::christoffel_unchecked(patch, x, h);

  Matrix divergence = Matrix::Zero(n, n); // d_i G^i_jk
  Matrix trace_grad = Matrix::Zero(n, n); // d_j G^i_ik
  for (int l = 0; l < n; ++l) {
    std::vector<Matrix> d_gamma(static_cast<std::size_t>(n), Matrix::Zero(n, n));
    for (std::size_t s = 0; s < detail::kFirstOffsets.size(); ++s) {
      const Christoffel shifted =
          detail::christoffel_unchecked(patch, detail::shifted(x, l, detail::kFirstOffsets[s] * h), h);
      for (int i = 0; i < n; ++i) d_gamma[i] += (detail::kFirstWeights[s] / h) * shifted.upper[i];
    }
    divergence += d_gamma[l];
    for (int i = 0; i < n; ++i) trace_grad.row(l) += d_gamma[i].row(i);
  }

  Vector trace(n); // G^i_ip
  for (int p = 0; p < n; ++p) {
    trace[p] = 0.0;
    for (int i = 0; i < n; ++i) trace[p] += gamma(i, i, p);
  }
  Matrix quadratic = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double q = 0.0;
      for (int p = 0; p < n; ++p) {
        q += trace[p] * gamma(p, j, k);
        for (int i = 0; i < n; ++i) q -= gamma(i, j, p) * gamma(p, i, k);
      }
      quadratic(j, k) = q;
    }
  return detail::symmetrized(divergence - trace_grad + quadratic);
}

/// Covariant Hessian d_i d_j u - G^k_ij d_k u. Requires 2h clearance.
inline Matrix hessian_fd(const MetricPatch& patch, const ScalarField& u, const Vector& x,
                         double h = kDefaultStep) {
  detail::require_step(h);
  patch.domain().require_clearance(x, 2.0 * h, h);
  const int n = patch.dim();
  const Christoffel gamma = detail::christoffel_unchecked(patch, x, h);
  Vector du(n);
  for (int k = 0; k < n; ++k) du[k] = detail::first_derivative(u, x, k, h);
  Matrix hess(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = detail::second_derivative(u, x, i, j, h);
      for (int k = 0; k < n; ++k) v -= gamma(k, i, j) * du[k];
      hess(i, j) = v;
      hess(j, i) = v;
    }
  return hess;
}

struct GradientLaplacian {
  Vector differential; // d_i u
  Vector gradient;     // g^ij d_j u
  double laplacian = 0.0;
  double gradient_norm_sq = 0.0;
};

inline GradientLaplacian gradient_laplacian(const MetricPatch& patch, const ScalarField& u, const Vector& x,
                                            double h = kDefaultStep) {
  const Matrix hess = hessian_fd(patch, u, x, h);
  const Matrix ginv = inverse_metric(patch.metric(x));
  GradientLaplacian out;
  out.differential.resize(patch.dim());
  for (int k = 0; k < patch.dim(); ++k) out.differential[k] = detail::first_derivative(u, x, k, h);
  out.gradient = ginv * out.differential;
  out.laplacian = (ginv.cwiseProduct(hess)).sum();
  out.gradient_norm_sq = out.differential.dot(out.gradient);
  return out;
}

struct MatrixResidual {
  Matrix value;
  double norm = 0.0;
};

/// Ric + Hess(psi) - lambda g at x, with its Frobenius norm.
inline MatrixResidual soliton_residual(const MetricPatch& patch, const ScalarField& psi, double lambda,
                                       const Vector& x, double h = kDefaultStep) {
  MatrixResidual r;
  r.value = ricci_fd(patch, x, h) + hessian_fd(patch, psi, x, h) - lambda * patch.metric(x);
  r.norm = r.value.norm();
  return r;
}

/// Pullback of the patch under x = A*y: g'(y) = A^T g(A y) A.
inline MetricPatch transform_chart(const MetricPatch& patch, const Matrix& A) {
  if (A.rows() != patch.dim() || A.cols() != patch.dim())
    throw PreconditionError("transform_chart: map has wrong shape");
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) throw PreconditionError("transform_chart: singular chart map");
  auto g = [patch, A](const Vector& y) -> Matrix {
    const Vector x = A * y;
    return A.transpose() * patch.metric(x) * A;
  };
  return MetricPatch(patch.label() + " (pulled back)", patch.domain().pulled_back(A), std::move(g));
}

} // namespace ricsol
