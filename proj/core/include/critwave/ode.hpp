#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "critwave/error.hpp"
#include "critwave/grid.hpp"

namespace critwave {

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double h_init = 0.0;
  std::size_t max_steps = 20'000'000;
};

// Adaptive Dormand-Prince 5(4) with FSAL. The step size is carried across
// calls to advance(), so integrating node to node costs little extra.
template <std::size_t N>
class DormandPrince {
 public:
  using State = std::array<double, N>;
  using Rhs = std::function<void(double, const State&, State&)>;

  DormandPrince(Rhs f, OdeOptions opt = {}) : f_(std::move(f)), opt_(opt), h_(opt.h_init) {}

  void advance(double& x, State& y, double x_end) {
    if (x == x_end) return;
    const double dir = x_end > x ? 1.0 : -1.0;
    if (h_ == 0.0 || !have_k1_ || x != x_k1_) {
      f_(x, y, k1_);
      have_k1_ = true;
      x_k1_ = x;
    }
    if (h_ == 0.0) h_ = 1e-3 * std::max(std::abs(x_end - x), 1e-12);
    double h = std::min(std::abs(h_), std::abs(x_end - x));
    for (;;) {
      if (++steps_ > opt_.max_steps) raise(ErrorCode::step_size_underflow, "step budget exhausted");
      const bool last = h >= std::abs(x_end - x);
      if (last) h = std::abs(x_end - x);
      const double hs = dir * h;
      State ynew, err;
      step(x, y, hs, ynew, err);
      double norm = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        if (!std::isfinite(ynew[i]) || !std::isfinite(err[i])) finite = false;
        const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        norm = std::max(norm, std::abs(err[i]) / sc);
      }
      if (!finite) {
        h *= 0.25;
        if (h < 1e-15 * std::max(1.0, std::abs(x))) raise(ErrorCode::non_finite_state, "state overflowed");
        continue;
      }
      if (norm <= 1.0) {
        x = last ? x_end : x + hs;
        y = ynew;
        k1_ = k7_;
        x_k1_ = x;
        const double fac = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
        h_ = h * fac;
        if (last) {
          // Do not let a short final hop shrink the carried step.
          h_ = std::max(h_, h);
          return;
        }
        h = h_;
      } else {
        h *= std::clamp(0.9 * std::pow(norm, -0.2), 0.1, 0.9);
        if (h < 1e-15 * std::max(1.0, std::abs(x))) raise(ErrorCode::step_size_underflow, "adaptive step stalled");
      }
    }
  }

  std::size_t steps() const { return steps_; }

 private:
  void step(double x, const State& y, double h, State& out, State& err) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
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
    State t, k2, k3, k4, k5, k6;
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * a21 * k1_[i];
    f_(x + c2 * h, t, k2);
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * (a31 * k1_[i] + a32 * k2[i]);
    f_(x + c3 * h, t, k3);
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
    f_(x + c4 * h, t, k4);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f_(x + c5 * h, t, k5);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f_(x + h, t, k6);
    for (std::size_t i = 0; i < N; ++i)
      out[i] = y[i] + h * (b1 * k1_[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f_(x + h, out, k7_);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7_[i]);
  }

  Rhs f_;
  OdeOptions opt_;
  double h_;
  State k1_{}, k7_{};
  bool have_k1_ = false;
  double x_k1_ = 0.0;
  std::size_t steps_ = 0;
};

// Generalized power series used to start a radial integration away from the
// origin: sum_k coeffs[k] y^(lowest_power + k) + log(y) sum_k log_coeffs[k] y^k.
struct SeriesLaunch {
  int lowest_power = 0;
  std::vector<double> coeffs;
  std::vector<double> log_coeffs;
  double y0 = 1e-3;

  int order() const { return static_cast<int>(coeffs.size()) - 1 + lowest_power; }
  double value(double y) const;
  double derivative(double y) const;
};

// Regular launch for u'' + (3/y) u' = g(y) u + h(y), with g and h given by
// their Taylor coefficients (index = power of y). Returns the even series to
// the requested order with u(0) = u0.
SeriesLaunch regular_launch(const std::vector<double>& g, const std::vector<double>& h, double u0,
                            int order = 4, double y0 = 1e-3);

// u'' = rhs(y, u, u').
using RadialRhs = std::function<double(double, double, double)>;

// Integrates from the launch radius through every grid node. Nodes below the
// launch radius take the series values.
RadialFunction integrate_radial_ode(const RadialRhs& rhs, const SeriesLaunch& launch, const RadialGrid& grid,
                                    const OdeOptions& opt = {});

}  // namespace critwave
