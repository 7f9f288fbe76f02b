// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ricsol/cli.hpp"
#include "ricsol/fixtures.hpp"
#include "ricsol/interpolation.hpp"
#include "ricsol/quotient.hpp"
#include "ricsol/soliton_ode.hpp"
#include "ricsol/warped_geometry.hpp"

using namespace ricsol;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

AnsatzParams params(int k, int m, double lambda) {
  AnsatzParams p;
  p.k = k;
  p.m = m;
  p.lambda = lambda;
  return p;
}

const std::vector<AnsatzParams>& profile_cases() {
  static const std::vector<AnsatzParams> cases{params(1, 2, 0.0), params(2, 3, 0.0), params(1, 2, -0.1)};
  return cases;
}

Vector concat(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

WarpedGeometry cylinder(int m, double lambda, double lambda_used) {
  const double b0 = std::sqrt((m - 1) / lambda);
  return WarpedGeometry{fixtures::flat(1, 20.0), fixtures::round_sphere(m), ScalarField::constant(b0),
                        ScalarField{"lambda t^2/2", [lambda](const Vector& x) { return 0.5 * lambda * x[0] * x[0]; }},
                        SolitonConstants{lambda_used, m, static_cast<double>(m - 1), lambda_used}};
}

std::vector<Vector> cylinder_samples(int m) {
  std::vector<Vector> out;
  for (int i = 0; i < 6; ++i) {
    Vector t(1);
    t[0] = -2.5 + i;
    Vector xf = Vector::Constant(m, 0.9 + 0.2 * i);
    xf[m - 1] = -1.0 + 0.4 * i;
    out.push_back(concat(t, xf));
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// 1. Closed-form block Ricci against the finite-difference oracle.
Outcome check_oracle_equivalence() {
  struct Fixture {
    std::string name;
    WarpedGeometry w;
    std::vector<Vector> points;
  };
  std::vector<Fixture> fixtures;
  auto polar_points = [](int fiber_dim) {
    std::vector<Vector> out;
    for (int i = 0; i < 4; ++i) {
      Vector x(2 + fiber_dim);
      x[0] = 0.6 + 0.7 * i;
      x[1] = -2.5 + 1.6 * i;
      for (int j = 0; j < fiber_dim; ++j) x[2 + j] = 0.7 + 0.5 * j + 0.2 * i;
      out.push_back(x);
    }
    return out;
  };
  fixtures.push_back({"product", WarpedGeometry{fixtures::polar_plane(), fixtures::round_sphere(2),
                                                ScalarField::constant(1.0), ScalarField::constant(0.0),
                                                SolitonConstants{0.0, 2, 1.0, 0.0}},
                      polar_points(2)});
  fixtures.push_back({"cylinder", cylinder(3, 0.5, 0.5), cylinder_samples(3)});
  fixtures.push_back({"annulus", WarpedGeometry{fixtures::polar_plane(), fixtures::flat_torus(1),
                                                ScalarField{"t", [](const Vector& x) { return x[0]; }},
                                                ScalarField::constant(0.0), SolitonConstants{0.0, 1, 0.0, 0.0}},
                      polar_points(1)});
  fixtures.push_back(
      {"bumpy", WarpedGeometry{fixtures::polar_plane(), fixtures::round_sphere(2, 1.3),
                               ScalarField{"bump", [](const Vector& x) {
                                             return 1.0 + 0.3 * x[0] * x[0] + 0.1 * x[0] * std::cos(x[1]);
                                           }},
                               ScalarField::constant(0.0), SolitonConstants{0.0, 2, 1.0, 0.0}},
       polar_points(2)});
  for (const auto& p : {params(1, 2, 0.0), params(2, 3, -0.1)}) {
    ProfileCertifyOptions opts;
    opts.samples = 6;
    auto g = profile_geometry(shoot(p), opts);
    fixtures.push_back({"profile k=" + std::to_string(p.k) + " m=" + std::to_string(p.m), g.warped, g.samples});
  }

  double worst = 0.0, worst_hv = 0.0;
  for (const auto& f : fixtures) {
    const auto total = assemble_warped(f.w);
    for (const auto& x : f.points) {
      const BlockMatrix closed = ricci_closed_form(f.w, x);
      const BlockMatrix oracle = BlockMatrix::split(ricci_fd(total, x), f.w.base_dim());
      worst = std::max({worst, (closed.HH - oracle.HH).norm(), (closed.VV - oracle.VV).norm()});
      worst_hv = std::max(worst_hv, oracle.HV.norm());
    }
  }
  return {fixtures.size() >= 5 && worst <= 1e-5 && worst_hv <= 1e-6,
          std::to_string(fixtures.size()) + " fixtures, max block diff " + fmt(worst) + " (<= 1e-5), max oracle HV " +
              fmt(worst_hv) + " (<= 1e-6)"};
}

// 2. Round cylinder certifies; a 1% error in lambda is caught.
Outcome check_cylinder_pipeline() {
  bool ok = true;
  double worst = 0.0, weakest_failure = std::numeric_limits<double>::infinity();
  for (int m : {2, 3}) {
    CertifyOptions opts;
    opts.tolerance = 1e-8;
    const auto samples = cylinder_samples(m);
    const auto good = certify_soliton(cylinder(m, 0.5, 0.5), samples, opts);
    ok = ok && good.passed();
    for (const auto& c : good.checks) worst = std::max(worst, c.max_residual);
    const auto bad = certify_soliton(cylinder(m, 0.5, 0.5 * 1.01), samples, opts);
    double largest = 0.0;
    for (const auto& c : bad.checks) largest = std::max(largest, c.max_residual);
    weakest_failure = std::min(weakest_failure, largest);
    ok = ok && !bad.passed() && largest >= 1e-3;
  }
  return {ok && worst <= 1e-8, "m in {2,3}: max residual " + fmt(worst) + " (<= 1e-8); 1% lambda error gives " +
                                   fmt(weakest_failure) + " (>= 1e-3) and fails"};
}

// 3. First integral along shot profiles. Reports mu from the equations and
// from finite differences of the b' column.
Outcome check_first_integral() {
  bool ok = true;
  std::string detail;
  for (const auto& p : profile_cases()) {
    const auto prof = shoot(p);
    const double mu = prof.mu_mean();
    const auto b_pp = grid_derivative(prof.t, prof.b_prime);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < prof.size(); ++i) {
      const double laplacian_b = b_pp[i] + (p.k > 0 ? p.k * prof.a_prime[i] / prof.a[i] * prof.b_prime[i] : 0.0);
      const double v = p.lambda * prof.b[i] * prof.b[i] + prof.b[i] * laplacian_b +
                       (p.m - 1) * prof.b_prime[i] * prof.b_prime[i] - prof.b[i] * prof.phi_prime[i] * prof.b_prime[i];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double bound = 1e-6 * (1 + std::abs(mu));
    const bool pass = prof.status == ShootStatus::completed && prof.t.back() == 10.0 && prof.mu_spread() <= bound &&
                      hi - lo <= bound;
    ok = ok && pass;
    detail += "(" + std::to_string(p.k) + "," + std::to_string(p.m) + "," + fmt(p.lambda) + ") spread " +
              fmt(prof.mu_spread()) + " / fd " + fmt(hi - lo) + "; ";
  }
  return {ok, detail + "bound 1e-6(1+|mu|) on [eps, 10]"};
}

// 4. Full soliton residual of the assembled metric along certified profiles.
Outcome check_end_to_end() {
  bool ok = true;
  double worst = 0.0;
  int points = std::numeric_limits<int>::max();
  for (const auto& p : profile_cases()) {
    const auto report = certify_profile(shoot(p));
    const auto* res = report.find("soliton_residual");
    ok = ok && report.passed() && res && res->max_residual <= 1e-5 && res->sample_count >= 20;
    if (res) {
      worst = std::max(worst, res->max_residual);
      points = std::min(points, static_cast<int>(res->sample_count));
    }
  }
  return {ok, "3 profiles, " + std::to_string(points) + " points each on t in [0.2, 5], max residual " + fmt(worst) +
                  " (<= 1e-5)"};
}

// 5. Quotient certificates.
Outcome check_quotients() {
  auto geometry = [](const AnsatzParams& p) {
    const auto prof = shoot(p);
    const auto g = profile_geometry(prof);
    return ambient_warped(p.k, p.m, g.a, g.b, g.phi);
  };
  auto residual = [](const QuotientCertificate& c) {
    return std::max({c.base_isometry, c.fiber_isometry, c.f_invariance, c.phi_invariance, c.group_law,
                     c.diagonal_isometry});
  };
  const auto antipodal = certify_quotient(make_cyclic_action(2, 1, 2, ActionKind::antipodal), geometry(params(1, 2, 0.0)));
  const auto hopf = certify_quotient(make_cyclic_action(3, 2, 3, ActionKind::hopf), geometry(params(2, 3, 0.0)));
  const auto pole_action = make_cyclic_action(2, 1, 2, ActionKind::axis_rotation);
  const auto pole = certify_quotient(pole_action, geometry(params(1, 2, 0.0)));

  // The minimum must be attained at a fixed direction of the rotation.
  bool at_eigenspace = false;
  const Matrix g = pole_action.fiber_generator;
  for (const auto& x : pole_action.fiber_samples)
    if ((g * x - x).norm() == pole.freeness_margin && ((g - Matrix::Identity(3, 3)) * x).norm() == 0.0)
      at_eigenspace = true;

  const bool ok = antipodal.passed() && antipodal.freeness_margin > 0.1 && residual(antipodal) <= 1e-10 &&
                  hopf.passed() && hopf.freeness_margin > 0.1 && residual(hopf) <= 1e-10 && !pole.passed() &&
                  pole.freeness_margin == 0.0 && at_eigenspace;
  return {ok, "Z2 antipodal S^2 margin " + fmt(antipodal.freeness_margin) + " residual " + fmt(residual(antipodal)) +
                  "; Z3 hopf S^3 margin " + fmt(hopf.freeness_margin) + " residual " + fmt(residual(hopf)) +
                  "; pole rotation margin " + fmt(pole.freeness_margin) + (at_eigenspace ? " at a fixed direction" : "")};
}

// 6. Convergence order of the oracle and stability of the series start.
Outcome check_refinement() {
  const auto sphere = fixtures::round_sphere(3);
  Vector x(3);
  x << 1.1, 0.8, 0.4;
  auto error = [&](double h) { return (ricci_fd(sphere, x, h) - 2.0 * sphere.metric(x)).norm(); };
  const double e1 = error(0.08), e2 = error(0.04);
  const double order = std::log2(e1 / e2);

  double worst = 0.0;
  for (auto p : profile_cases()) {
    p.t_max = 1.5;
    const auto coarse = shoot(p);
    p.epsilon /= 2;
    p.atol /= 2;
    p.rtol /= 2;
    const auto fine = shoot(p);
    const std::size_t i = 100; // t = 1 on both grids
    if (coarse.t[i] != 1.0 || fine.t[i] != 1.0) return {false, "output grid does not contain t = 1"};
    worst = std::max({worst, std::abs(coarse.a[i] - fine.a[i]), std::abs(coarse.b[i] - fine.b[i]),
                      std::abs(coarse.phi[i] - fine.phi[i]), std::abs(coarse.b_prime[i] - fine.b_prime[i])});
  }
  return {order >= 1.8 && worst <= 1e-7,
          "observed order " + fmt(order) + " (>= 1.8); profile change at t = 1 " + fmt(worst) + " (<= 1e-7)"};
}

// 7. Sweep CSV identical across runs and thread counts.
Outcome check_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ricsol_acceptance_sweep";
  nlohmann::json cfg = {{"schema_version", 1},
                        {"sweep", {{"k", {1, 2}}, {"m", {2, 3}}, {"lambda", {-0.1, 0.0, 0.5}}, {"b0", {1.0}}}}};
  std::vector<std::string> outputs;
  std::size_t rows = 0;
  for (unsigned threads : {1u, 4u, 1u, 4u}) {
    auto c = cli::parse_config(cfg);
    c.output_dir = (dir / std::to_string(outputs.size())).string();
    c.sweep.threads = threads;
    rows = cli::cmd_sweep(c).report["rows"].get<std::size_t>();
    std::ifstream in(fs::path(c.output_dir) / "sweep.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    outputs.push_back(ss.str());
  }
  fs::remove_all(dir);
  bool same = true;
  for (const auto& o : outputs) same = same && o == outputs.front();
  return {same && rows == 12, std::to_string(rows) + "-point grid, 2 serial + 2 parallel runs " +
                                  (same ? "byte-identical" : "differ")};
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence of the block Ricci formula", 30, check_oracle_equivalence},
      {2, "cylinder certification pipeline", 5, check_cylinder_pipeline},
      {3, "first integral conservation", 20, check_first_integral},
      {4, "end-to-end soliton residual", 60, check_end_to_end},
      {5, "quotient certificates", 5, check_quotients},
      {6, "refinement stability", 30, check_refinement},
      {7, "sweep determinism", 60, check_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs <= c.budget_s;
    failed += !pass;
    std::printf("[%s] criterion %d: %s | %s | %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
