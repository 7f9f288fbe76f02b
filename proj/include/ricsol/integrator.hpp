#pragma once
//! \file integrator.hpp
//  \brief Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace ricsol {

enum class IntegrationOutcome { reached, stopped, step_underflow, too_many_steps };

struct IntegratorOptions {
  double atol = 1e-10;
  double rtol = 1e-10;
  double initial_step = 1e-4;
  double min_step = 1e-14; ///< relative to max(1, |t|)
  std::size_t max_steps = 5'000'000;
};

template <int N>
class DormandPrince54 {
public:
  using State = Eigen::Matrix<double, N, 1>;

  explicit DormandPrince54(IntegratorOptions opts = {}) : opts_(opts), step_(opts.initial_step) {}

  double step_size() const { return step_; }
  std::size_t steps_taken() const { return steps_; }

  /// Advance (t, y) to t_end. `stop(t, y)` is checked after every accepted
  /// step; returning true ends the integration early with outcome `stopped`.
  /// Steps that produce non-finite stages are rejected and retried smaller.
  template <class Rhs, class Stop>
  IntegrationOutcome advance(const Rhs& rhs, double& t, State& y, double t_end, const Stop& stop) {
    while (t < t_end) {
      if (steps_ >= opts_.max_steps) return IntegrationOutcome::too_many_steps;
      const double floor = opts_.min_step * std::max(1.0, std::abs(t));
      if (step_ < floor) return IntegrationOutcome::step_underflow;
      const bool last = t + step_ >= t_end;
      const double h = last ? t_end - t : step_;

      State y_new, err;
      attempt(rhs, t, y, h, y_new, err);
      const double e = error_norm(y, y_new, err);
      if (!std::isfinite(e) || !y_new.allFinite()) {
        step_ = 0.25 * h;
        continue;
      }
      if (e <= 1.0) {
        t = last ? t_end : t + h;
        y = y_new;
        ++steps_;
        const double grow = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
        // Keep the proposed step when the last step was only clipped to t_end.
        if (!last || h >= step_) step_ = h * grow;
        if (stop(t, y)) return IntegrationOutcome::stopped;
      } else {
        step_ = h * std::clamp(0.9 * std::pow(e, -0.2), 0.1, 0.9);
      }
    }
    return IntegrationOutcome::reached;
  }

private:
  template <class Rhs>
  static void attempt(const Rhs& rhs, double t, const State& y, double h, State& y_new, State& err) {
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + h / 5.0, State(y + h * (k1 / 5.0)));
    const State k3 = rhs(t + 3.0 * h / 10.0, State(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)));
    const State k4 = rhs(t + 4.0 * h / 5.0, State(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3)));
    const State k5 = rhs(t + 8.0 * h / 9.0, State(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                                         64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4)));
    const State k6 = rhs(t + h, State(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 +
                                               49.0 / 176.0 * k4 - 5103.0 / 18656.0 * k5)));
    y_new = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                     11.0 / 84.0 * k6);
    const State k7 = rhs(t + h, y_new);
    err = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4 - 17253.0 / 339200.0 * k5 +
               22.0 / 525.0 * k6 - 1.0 / 40.0 * k7);
  }

  double error_norm(const State& y, const State& y_new, const State& err) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale = opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      acc += (err[i] / scale) * (err[i] / scale);
    }
    return std::sqrt(acc / static_cast<double>(y.size()));
  }

  IntegratorOptions opts_;
  double step_;
  std::size_t steps_ = 0;
};

} // namespace ricsol
