#pragma once
//! \file soliton_ode.hpp
//  \brief Cohomogeneity-one solitons dt^2 + a(t)^2 g_{S^k} + b(t)^2 g_{S^m}
//  with potential phi(t), integrated by shooting from a smooth origin.
//
//  Substituting the ansatz into Ric + Hess(phi) = lambda g gives, for the
//  radial direction and the two sphere factors,
//
//    (tt)   phi'' = lambda + k a''/a + m b''/b
//    (S^k)  a''/a = -(k-1)(a'^2 - 1)/a^2 - m a'b'/(ab) + phi' a'/a - lambda
//    (S^m)  b''/b = -(m-1)(b'^2 - 1)/b^2 - k a'b'/(ab) + phi' b'/b - lambda
//
//  using Ric_tt = -k a''/a - m b''/b, Ric|_{S^k} = [-a''/a - (k-1)(a'^2-1)/a^2
//  - m a'b'/(ab)] a^2 g_{S^k} (likewise for S^m) and Hess(phi) = phi'' dt^2 +
//  phi' a a' g_{S^k} + phi' b b' g_{S^m}. These are checked against the
//  finite-difference oracle by certify_profile, which assembles the full
//  (1+k+m)-dimensional metric and evaluates the soliton equation on it.
//
//  Smoothness at t = 0 (k >= 1) needs a(0) = 0, a'(0) = 1, b'(0) = 0,
//  phi'(0) = 0. Writing a = t + a3 t^3, b = b0 + b2 t^2, phi = phi2 t^2, the
//  (S^m) equation at leading order gives
//
//    b2 = ((m-1)/b0 - lambda b0) / (2(k+1)),
//
//  the (S^k) equation gives 6k a3 = -2m b2/b0 + 2 phi2 - lambda, and the (tt)
//  equation is then satisfied identically. So phi''(0) = 2 phi2 is a free
//  shooting parameter alongside b0 (it defaults to lambda, which reproduces
//  the Gaussian times round-cylinder solution when b0^2 = (m-1)/lambda).
//
//  On solutions, lambda b^2 + b Lap b + (m-1) b'^2 - b phi' b' reduces to m-1
//  by the (S^m) equation, so the recorded mu(t) is a consistency check on the
//  arithmetic, not on the integrator. The residual columns res_* use second
//  derivatives obtained by differencing the first-derivative columns, which
//  does measure integration error.

#include "ricsol/fixtures.hpp"
#include "ricsol/integrator.hpp"
#include "ricsol/interpolation.hpp"
#include "ricsol/warped_geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace ricsol {

struct AnsatzParams {
  int k = 1;           ///< dimension of the sphere in the base R^{k+1}; 0 means the base is a line
  int m = 2;           ///< fiber sphere dimension
  double lambda = 0.0; ///< soliton constant
  double b0 = 1.0;     ///< fiber radius at the origin
  std::optional<double> phi_pp0; ///< phi''(0); defaults to lambda
  double b_prime_offset = 0.0;   ///< added to the smooth initial b'(epsilon); nonzero only to test detectors
  double epsilon = 1e-4;
  double t_max = 10.0;
  double output_step = 0.01;
  double atol = 1e-10;
  double rtol = 1e-10;

  double potential_curvature() const { return phi_pp0.value_or(lambda); }

  void validate() const {
    auto fail = [](const std::string& what) { throw PreconditionError("ansatz parameters: " + what); };
    if (k < 0) fail("k must be >= 0");
    if (m < 1) fail("m must be >= 1");
    if (!std::isfinite(lambda)) fail("lambda must be finite");
    if (!(b0 > 0.0) || !std::isfinite(b0)) fail("b0 must be positive");
    if (!std::isfinite(potential_curvature())) fail("phi_pp0 must be finite");
    if (!std::isfinite(b_prime_offset)) fail("b_prime_offset must be finite");
    if (!(epsilon > 0.0)) fail("epsilon must be positive");
    if (!(output_step > epsilon)) fail("output_step must exceed epsilon");
    if (!(t_max >= 4.0 * output_step)) fail("t_max must cover at least four output steps");
    if (!(atol > 0.0) || !(rtol > 0.0)) fail("integrator tolerances must be positive");
  }
};

struct ReducedState {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
  double phi_prime = 0.0;
};

namespace detail {

/// Second derivatives (a'', b'', phi''); NaN when the metric has degenerated.
struct SecondDerivatives {
  double a = 0.0, b = 0.0, phi = 0.0;
};

inline SecondDerivatives reduced_second_derivatives(const ReducedState& s, int k, int m, double lambda) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (!(s.b > 0.0) || (k > 0 && !(s.a > 0.0))) return {nan, nan, nan};
  const double bp = s.b_prime, b = s.b;
  double b_ratio = -(m - 1) * (bp * bp - 1.0) / (b * b) + s.phi_prime * bp / b - lambda;
  double a_ratio = 0.0;
  if (k > 0) {
    const double a = s.a, ap = s.a_prime;
    b_ratio -= k * ap * bp / (a * b);
    a_ratio = -(k - 1) * (ap * ap - 1.0) / (a * a) - m * ap * bp / (a * b) + s.phi_prime * ap / a - lambda;
  }
  SecondDerivatives out;
  out.a = k > 0 ? s.a * a_ratio : 0.0;
  out.b = b * b_ratio;
  out.phi = lambda + k * a_ratio + m * b_ratio;
  return out;
}

} // namespace detail

/// Time derivative of the first-order system: the returned fields hold
/// (a', a'', b', b'', phi''). For k = 0 the a-equation is absent and a stays 1.
inline ReducedState reduced_rhs(const ReducedState& s, const AnsatzParams& p) {
  if (!(s.b > 0.0)) throw DegenerateMetricError("reduced_rhs: b must be positive");
  if (p.k > 0 && !(s.a > 0.0)) throw DegenerateMetricError("reduced_rhs: a must be positive");
  const auto dd = detail::reduced_second_derivatives(s, p.k, p.m, p.lambda);
  return {p.k > 0 ? s.a_prime : 0.0, dd.a, s.b_prime, dd.b, dd.phi};
}

struct OriginSeries {
  double a3 = 0.0;
  double b2 = 0.0;
  double phi2 = 0.0;
};

/// Leading Taylor coefficients of the smooth solution at the origin (k >= 1).
inline OriginSeries origin_series(const AnsatzParams& p) {
  if (p.k < 1) throw PreconditionError("origin_series: needs k >= 1");
  OriginSeries s;
  s.b2 = ((p.m - 1) / p.b0 - p.lambda * p.b0) / (2.0 * (p.k + 1));
  s.phi2 = 0.5 * p.potential_curvature();
  s.a3 = (-2.0 * p.m * s.b2 / p.b0 + 2.0 * s.phi2 - p.lambda) / (6.0 * p.k);
  return s;
}

/// Smooth series data at t = epsilon (k >= 1).
inline ReducedState taylor_init(const AnsatzParams& p) {
  p.validate();
  const auto s = origin_series(p);
  const double e = p.epsilon;
  const double scale = 1.0 + std::abs(s.a3) + std::abs(s.b2) + std::abs(s.phi2);
  if (scale * scale * e * e * e > 1e-8)
    throw PreconditionError("taylor_init: epsilon too large for the third-order series");
  return {e + s.a3 * e * e * e, 1.0 + 3.0 * s.a3 * e * e, p.b0 + s.b2 * e * e, 2.0 * s.b2 * e, 2.0 * s.phi2 * e};
}

/// State the shooting starts from: the series for k >= 1, symmetric line data
/// (b = b0, b' = 0, phi' = phi''(0) epsilon) for k = 0; b_prime_offset is added.
inline ReducedState initial_state(const AnsatzParams& p) {
  p.validate();
  ReducedState s;
  if (p.k > 0) {
    s = taylor_init(p);
  } else {
    s = {1.0, 0.0, p.b0, 0.0, p.potential_curvature() * p.epsilon};
  }
  s.b_prime += p.b_prime_offset;
  return s;
}

enum class ShootStatus { completed, degenerate, blowup, failed };

inline const char* to_string(ShootStatus s) {
  switch (s) {
  case ShootStatus::completed: return "completed";
  case ShootStatus::degenerate: return "degenerate";
  case ShootStatus::blowup: return "blowup";
  case ShootStatus::failed: return "failed";
  }
  return "unknown";
}

struct SolitonProfile {
  AnsatzParams params;
  std::vector<double> t, a, a_prime, b, b_prime, phi, phi_prime;
  std::vector<double> a_pp, b_pp, phi_pp; ///< from the reduced system
  std::vector<double> mu;                 ///< first integral at each node
  std::vector<double> res_tt, res_sk, res_sm;
  ShootStatus status = ShootStatus::completed;
  double lifetime = 0.0; ///< last time reached by the integrator
  std::string message;

  std::size_t size() const { return t.size(); }

  double mu_mean() const {
    double s = 0.0;
    for (double v : mu) s += v;
    return mu.empty() ? 0.0 : s / static_cast<double>(mu.size());
  }

  double mu_spread() const {
    if (mu.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
    return *hi - *lo;
  }

  /// Reached t_max with a, b positive and non-decreasing. Says nothing about completeness.
  bool long_lived() const {
    if (status != ShootStatus::completed || t.empty()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (!(a[i] > 0.0) || !(b[i] > 0.0) || a_prime[i] < -1e-12 || b_prime[i] < -1e-12) return false;
    return true;
  }

  ReducedState state(std::size_t i) const { return {a[i], a_prime[i], b[i], b_prime[i], phi_prime[i]}; }
};

/// Output grid: t_0 = epsilon, then multiples of output_step up to t_max.
inline std::vector<double> output_grid(const AnsatzParams& p) {
  std::vector<double> grid{p.epsilon};
  const auto n = static_cast<long>(std::floor(p.t_max / p.output_step + 1e-9));
  for (long i = 1; i <= n; ++i) grid.push_back(static_cast<double>(i) * p.output_step);
  return grid;
}

/// Fills second derivatives, mu and the reduced-equation residual columns from
/// the recorded (t, a, a', b, b', phi, phi') columns.
inline void annotate(SolitonProfile& prof) {
  const auto& p = prof.params;
  const std::size_t n = prof.size();
  prof.a_pp.assign(n, 0.0);
  prof.b_pp.assign(n, 0.0);
  prof.phi_pp.assign(n, 0.0);
  prof.mu.assign(n, 0.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  prof.res_tt.assign(n, nan);
  prof.res_sk.assign(n, nan);
  prof.res_sm.assign(n, nan);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = prof.state(i);
    const auto dd = detail::reduced_second_derivatives(s, p.k, p.m, p.lambda);
    prof.a_pp[i] = dd.a;
    prof.b_pp[i] = dd.b;
    prof.phi_pp[i] = dd.phi;
    const double grad_term = p.k > 0 ? p.k * s.a_prime / s.a * s.b * s.b_prime : 0.0;
    prof.mu[i] = p.lambda * s.b * s.b + s.b * dd.b + grad_term + (p.m - 1) * s.b_prime * s.b_prime -
                 s.b * s.phi_prime * s.b_prime;
  }
  if (n < 5) return;
  const auto app = grid_derivative(prof.t, prof.a_prime);
  const auto bpp = grid_derivative(prof.t, prof.b_prime);
  const auto ppp = grid_derivative(prof.t, prof.phi_prime);
  const int k = p.k, m = p.m;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = prof.a[i], ap = prof.a_prime[i], b = prof.b[i], bp = prof.b_prime[i], pp = prof.phi_prime[i];
    const double a_ratio = k > 0 ? app[i] / a : 0.0;
    const double cross = k > 0 ? ap * bp / (a * b) : 0.0;
    prof.res_tt[i] = ppp[i] - p.lambda - k * a_ratio - m * bpp[i] / b;
    prof.res_sk[i] =
        k > 0 ? a_ratio + (k - 1) * (ap * ap - 1.0) / (a * a) + m * cross - pp * ap / a + p.lambda : 0.0;
    prof.res_sm[i] = bpp[i] / b + (m - 1) * (bp * bp - 1.0) / (b * b) + k * cross - pp * bp / b + p.lambda;
  }
}

inline constexpr double kDegeneracyThreshold = 1e-6;
inline constexpr double kBlowupThreshold = 1e12;

/// Integrates the reduced system from the origin data out to t_max, recording
/// the state on the output grid. Stops early when a or b reaches zero
/// (degenerate), when the state exceeds kBlowupThreshold (blowup) or when the
/// step size underflows away from a degeneration (failed).
inline SolitonProfile shoot(const AnsatzParams& params) {
  params.validate();
  using Integrator = DormandPrince54<6>;
  using State = Integrator::State; // a, a', b, b', phi', phi

  SolitonProfile prof;
  prof.params = params;
  const auto start = initial_state(params);
  State y;
  y << start.a, start.a_prime, start.b, start.b_prime, start.phi_prime, 0.0;

  const int k = params.k, m = params.m;
  const double lambda = params.lambda;
  const auto rhs = [k, m, lambda](double, const State& s) -> State {
    const ReducedState rs{s[0], s[1], s[2], s[3], s[4]};
    const auto dd = detail::reduced_second_derivatives(rs, k, m, lambda);
    State d;
    d << (k > 0 ? s[1] : 0.0), dd.a, s[3], dd.b, dd.phi, s[4];
    return d;
  };
  const auto min_radius = [k](const State& s) { return k > 0 ? std::min(s[0], s[2]) : s[2]; };
  const auto stop = [&](double, const State& s) {
    return min_radius(s) <= kDegeneracyThreshold || s.cwiseAbs().maxCoeff() > kBlowupThreshold;
  };

  auto record = [&prof](double t, const State& s) {
    prof.t.push_back(t);
    prof.a.push_back(s[0]);
    prof.a_prime.push_back(s[1]);
    prof.b.push_back(s[2]);
    prof.b_prime.push_back(s[3]);
    prof.phi_prime.push_back(s[4]);
    prof.phi.push_back(s[5]);
  };

  IntegratorOptions opts;
  opts.atol = params.atol;
  opts.rtol = params.rtol;
  opts.initial_step = std::min(params.epsilon, 1e-3 * params.output_step);
  Integrator integrator(opts);

  const auto grid = output_grid(params);
  double t = grid.front();
  record(t, y);
  prof.status = ShootStatus::completed;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto outcome = integrator.advance(rhs, t, y, grid[i], stop);
    if (outcome == IntegrationOutcome::reached) {
      t = grid[i]; // exact grid value
      record(t, y);
      continue;
    }
    if (outcome == IntegrationOutcome::stopped) {
      prof.status = y.cwiseAbs().maxCoeff() > kBlowupThreshold ? ShootStatus::blowup : ShootStatus::degenerate;
    } else if (outcome == IntegrationOutcome::step_underflow && min_radius(y) < 1e-3) {
      prof.status = ShootStatus::degenerate;
    } else {
      prof.status = ShootStatus::failed;
    }
    prof.message = std::string(to_string(prof.status)) + " at t = " + std::to_string(t) +
                   (outcome == IntegrationOutcome::step_underflow  ? " (step size underflow)"
                    : outcome == IntegrationOutcome::too_many_steps ? " (step limit)"
                                                                    : "");
    break;
  }
  prof.lifetime = prof.status == ShootStatus::completed ? grid.back() : t;
  annotate(prof);
  return prof;
}

// ---------------------------------------------------------------------------
// Certification of a profile
// ---------------------------------------------------------------------------

struct ProfileCertifyOptions {
  double tolerance = 1e-5;
  double h = kDefaultStep;
  int samples = 20;
  double t_min = 0.2;
  double t_max = 5.0;
};

/// Everything certify_profile builds from a profile, exposed for reuse.
struct ProfileGeometry {
  QuinticHermite a, b, phi;
  WarpedGeometry warped;
  std::vector<Vector> samples; ///< product points (t, base angles, fiber coordinates)
};

namespace detail {

// Deterministic interior point of a domain box: fractions in [0.3, 0.7].
inline Vector interior_point(const Domain& d, int index, int salt) {
  Vector z(d.dim());
  for (int i = 0; i < d.dim(); ++i) {
    const double u = std::fmod(0.6180339887498949 * (index + 1) + 0.3710678118654752 * (i + 1 + salt), 1.0);
    z[i] = d.lower()[i] + (0.3 + 0.4 * u) * (d.upper()[i] - d.lower()[i]);
  }
  return d.from_box(z);
}

/// Fiber of the requested Einstein constant: round sphere for mu > 0, flat
/// torus for mu = 0, hyperbolic space for mu < 0.
inline MetricPatch einstein_fiber(int m, double mu) {
  constexpr double zero = 1e-9;
  if (std::abs(mu) <= zero) return fixtures::flat_torus(m);
  if (m < 2) throw PreconditionError("einstein fiber: a 1-dimensional fiber is flat, but mu = " + std::to_string(mu));
  if (mu > 0) return fixtures::round_sphere(m, std::sqrt((m - 1) / mu));
  return fixtures::hyperbolic_space(m, std::sqrt((m - 1) / -mu));
}

} // namespace detail

/// Rebuilds (a, b, phi) as C^2 interpolants from the first-derivative columns
/// and sets up the warped geometry: base dt^2 + a^2 g_{S^k}, warping f = b,
/// potential phi, fiber with Ric_F = mean(mu) g_F.
inline ProfileGeometry profile_geometry(const SolitonProfile& prof, const ProfileCertifyOptions& opts = {}) {
  const auto& p = prof.params;
  if (prof.size() < 5) throw PreconditionError("profile has fewer than 5 nodes");
  for (std::size_t i = 0; i < prof.size(); ++i)
    if (!(prof.b[i] > 0.0) || (p.k > 0 && !(prof.a[i] > 0.0)))
      throw PreconditionError("profile is not positive at t = " + std::to_string(prof.t[i]));
  const double t_hi = std::min(opts.t_max, prof.t.back() - 0.1);
  if (!(t_hi > opts.t_min) || opts.samples < 1)
    throw PreconditionError("profile does not cover the certification window");

  const QuinticHermite a(prof.t, prof.a, prof.a_prime, grid_derivative(prof.t, prof.a_prime));
  const QuinticHermite b(prof.t, prof.b, prof.b_prime, grid_derivative(prof.t, prof.b_prime));
  const QuinticHermite phi(prof.t, prof.phi, prof.phi_prime, grid_derivative(prof.t, prof.phi_prime));

  const auto base = fixtures::radial_warped_chart(p.k, a, prof.t.front(), prof.t.back(), "profile base");
  const double mu = prof.mu_mean();
  ProfileGeometry out{a, b, phi,
                      WarpedGeometry{base, detail::einstein_fiber(p.m, mu),
                                     ScalarField{"b(t)", [b](const Vector& x) { return b(x[0]); }},
                                     ScalarField{"phi(t)", [phi](const Vector& x) { return phi(x[0]); }},
                                     SolitonConstants{p.lambda, p.m, mu, 0.0}},
                      {}};

  std::vector<Vector> base_pts;
  for (int j = 0; j < opts.samples; ++j) {
    const double t = opts.samples == 1 ? opts.t_min : opts.t_min + (t_hi - opts.t_min) * j / (opts.samples - 1);
    Vector xb = detail::interior_point(base.domain(), j, 0);
    xb[0] = t;
    const Vector xf = detail::interior_point(out.warped.fiber.domain(), j, 7);
    Vector x(xb.size() + xf.size());
    x << xb, xf;
    out.samples.push_back(x);
    base_pts.push_back(xb);
  }
  out.warped.constants.c = calibrate_scalar_constant(out.warped, base_pts, opts.h).c;
  return out;
}

/// Certifies a shot profile: the warped-geometry pipeline on the assembled
/// (1+k+m)-dimensional chart, plus profile-level checks (origin closure,
/// reduced-equation residuals and mu conservation on the grid).
inline CertificationReport certify_profile(const SolitonProfile& prof, const ProfileCertifyOptions& opts = {}) {
  const auto geom = profile_geometry(prof, opts);
  auto report = certify_soliton(geom.warped, geom.samples, {opts.tolerance, opts.h});

  // Compare the first node with the smooth origin data (no b' offset).
  AnsatzParams smooth = prof.params;
  smooth.b_prime_offset = 0.0;
  const auto expected = initial_state(smooth);
  const auto got = prof.state(0);
  const double closure = std::max({std::abs(got.a - expected.a), std::abs(got.a_prime - expected.a_prime),
                                   std::abs(got.b - expected.b), std::abs(got.b_prime - expected.b_prime),
                                   std::abs(got.phi_prime - expected.phi_prime), std::abs(prof.phi.front())});
  report.add("origin_closure", closure, opts.tolerance, 1);

  const double lo = opts.t_min, hi = geom.samples.empty() ? lo : geom.samples.back()[0];
  double worst = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    if (prof.t[i] < lo || prof.t[i] > hi) continue;
    worst = std::max({worst, std::abs(prof.res_tt[i]), std::abs(prof.res_sk[i]), std::abs(prof.res_sm[i])});
    if (!std::isfinite(prof.res_tt[i]) || !std::isfinite(prof.res_sm[i])) worst = std::numeric_limits<double>::infinity();
    ++used;
  }
  report.add("reduced_equations", worst, opts.tolerance, used);
  const double mu_mean = prof.mu_mean();
  report.add("profile_mu_spread", prof.mu_spread(), opts.tolerance * (1.0 + std::abs(mu_mean)), prof.size());
  return report;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

struct SweepGrid {
  AnsatzParams base; ///< everything not swept
  std::vector<int> k, m;
  std::vector<double> lambda, b0;
  std::vector<double> phi_pp0; ///< empty: use each row's lambda

  std::vector<AnsatzParams> rows() const {
    std::vector<AnsatzParams> out;
    const std::vector<std::optional<double>> curv = [&] {
      std::vector<std::optional<double>> c;
      if (phi_pp0.empty()) c.push_back(std::nullopt);
      for (double v : phi_pp0) c.emplace_back(v);
      return c;
    }();
    for (int kk : k)
      for (int mm : m)
        for (double l : lambda)
          for (double b : b0)
            for (const auto& pc : curv) {
              AnsatzParams p = base;
              p.k = kk;
              p.m = mm;
              p.lambda = l;
              p.b0 = b;
              p.phi_pp0 = pc;
              out.push_back(p);
            }
    return out;
  }
};

struct SweepRow {
  AnsatzParams params;
  ShootStatus status = ShootStatus::failed;
  double lifetime = 0.0;
  double mu_mean = 0.0, mu_spread = 0.0;
  std::optional<double> growth_a, growth_b; ///< log-log slope over the last decade
  bool long_lived = false;
  bool a_increasing = false, b_increasing = false; ///< monotone over the whole profile
  std::string message;
};

/// Slope of log y against log t over nodes with t in [t_last/10, t_last].
inline std::optional<double> growth_exponent(std::span<const double> t, std::span<const double> y) {
  if (t.empty() || !(t.back() > 0.0)) return std::nullopt;
  const double lo = t.back() / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo) continue;
    if (!(y[i] > 0.0)) return std::nullopt;
    const double lx = std::log(t[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

inline SweepRow sweep_row(const AnsatzParams& params) {
  SweepRow row;
  row.params = params;
  try {
    const auto prof = shoot(params);
    row.status = prof.status;
    row.lifetime = prof.lifetime;
    row.mu_mean = prof.mu_mean();
    row.mu_spread = prof.mu_spread();
    row.long_lived = prof.long_lived();
    row.message = prof.message;
    if (params.k > 0) row.growth_a = growth_exponent(prof.t, prof.a);
    row.growth_b = growth_exponent(prof.t, prof.b);
    const auto nondecreasing = [](const std::vector<double>& slope) {
      return std::all_of(slope.begin(), slope.end(), [](double v) { return v >= -1e-12; });
    };
    row.a_increasing = params.k > 0 && nondecreasing(prof.a_prime) && prof.a.back() > prof.a.front();
    row.b_increasing = nondecreasing(prof.b_prime) && prof.b.back() > prof.b.front();
  } catch (const std::exception& e) {
    row.status = ShootStatus::failed;
    row.message = e.what();
  }
  return row;
}

/// Shoots every row of the grid. Rows are independent; with threads > 1 they
/// run concurrently and are gathered back in grid order.
inline std::vector<SweepRow> sweep(const SweepGrid& grid, unsigned threads = 1) {
  const auto params = grid.rows();
  std::vector<SweepRow> out(params.size());
  if (threads <= 1 || params.size() <= 1) {
    for (std::size_t i = 0; i < params.size(); ++i) out[i] = sweep_row(params[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(threads, params.size());
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < params.size(); i = next++) out[i] = sweep_row(params[i]);
    });
  for (auto& th : pool) th.join();
  return out;
}

} // namespace ricsol
