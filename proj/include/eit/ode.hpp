#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "eit/errors.hpp"

namespace eit::ode {

struct Tolerances {
  double rtol = 1e-8;
  double atol = 1e-12;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double last_step = 0.0;
};

// Dormand-Prince 5(4) with FSAL and a proportional step controller. State is
// any Eigen dense object supporting linear combinations and cwiseAbs().
template <class State, class Rhs>
class DormandPrince45 {
 public:
  DormandPrince45(Rhs rhs, Tolerances tol, std::size_t max_steps = 50'000'000)
      : rhs_(std::move(rhs)), tol_(tol), max_steps_(max_steps) {}

  // Advances y from t0 to t1 in place; h is the suggested first step and is
  // updated with the last accepted step.
  void integrate(State& y, double t0, double t1, double& h, StepStats& stats) {
    double t = t0;
    if (!have_k1_) {
      k1_ = rhs_(y);
      have_k1_ = true;
    }
    if (!(h > 0.0)) h = (t1 - t0) * 1e-3;
    while (t < t1) {
      if (stats.accepted + stats.rejected >= max_steps_) {
        throw NumericalError("integrator exceeded its step budget", last_error_);
      }
      const bool last = t + h >= t1 * (1 - 1e-15);
      const double step = last ? t1 - t : h;
      State k2 = rhs_(y + step * (a21 * k1_));
      State k3 = rhs_(y + step * (a31 * k1_ + a32 * k2));
      State k4 = rhs_(y + step * (a41 * k1_ + a42 * k2 + a43 * k3));
      State k5 = rhs_(y + step * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
      State k6 = rhs_(y + step * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      State y_new = y + step * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      State k7 = rhs_(y_new);
      State err = step * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const auto scale = (tol_.atol + tol_.rtol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array());
      const double en = std::sqrt((err.cwiseAbs().array() / scale).square().mean());
      last_error_ = en;
      if (!std::isfinite(en)) {
        throw NumericalError("non-finite local error estimate", en);
      }
      if (en <= 1.0) {
        t = last ? t1 : t + step;
        y = std::move(y_new);
        k1_ = std::move(k7);
        ++stats.accepted;
        stats.last_step = step;
        const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (!last || factor < 1.0) h = step * factor;
      } else {
        ++stats.rejected;
        h = step * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
        if (h < std::abs(t) * 4 * std::numeric_limits<double>::epsilon() || h == 0.0) {
          throw NumericalError("step size underflow", en);
        }
      }
    }
  }

  double last_error() const { return last_error_; }

 private:
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Rhs rhs_;
  Tolerances tol_;
  std::size_t max_steps_;
  State k1_;
  bool have_k1_ = false;
  double last_error_ = 0.0;
};

}  // namespace eit::ode
