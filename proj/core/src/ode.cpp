#include "critwave/ode.hpp"

#include <cmath>

namespace critwave {

double SeriesLaunch::value(double y) const {
  double s = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) s = s * y + coeffs[k];
  s *= std::pow(y, lowest_power);
  if (!log_coeffs.empty()) {
    double l = 0.0;
    for (std::size_t k = log_coeffs.size(); k-- > 0;) l = l * y + log_coeffs[k];
    s += std::log(y) * l;
  }
  return s;
}

double SeriesLaunch::derivative(double y) const {
  double s = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const int p = lowest_power + static_cast<int>(k);
    if (p != 0) s += coeffs[k] * p * std::pow(y, p - 1);
  }
  if (!log_coeffs.empty()) {
    double l = 0.0, dl = 0.0;
    for (std::size_t k = 0; k < log_coeffs.size(); ++k) {
      l += log_coeffs[k] * std::pow(y, static_cast<int>(k));
      if (k > 0) dl += log_coeffs[k] * static_cast<double>(k) * std::pow(y, static_cast<int>(k) - 1);
    }
    s += l / y + std::log(y) * dl;
  }
  return s;
}

SeriesLaunch regular_launch(const std::vector<double>& g, const std::vector<double>& h, double u0, int order,
                            double y0) {
  if (order < 2) raise(ErrorCode::domain_error, "launch order must be at least 2");
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c[0] = u0;
  auto coef = [](const std::vector<double>& v, int k) {
    return k >= 0 && static_cast<std::size_t>(k) < v.size() ? v[static_cast<std::size_t>(k)] : 0.0;
  };
  // Matching y^(k-2): k (k + 2) c_k = sum_j g_j c_(k-2-j) + h_(k-2).
  for (int k = 1; k <= order; ++k) {
    double rhs = coef(h, k - 2);
    for (int j = 0; j <= k - 2; ++j) rhs += coef(g, j) * c[static_cast<std::size_t>(k - 2 - j)];
    c[static_cast<std::size_t>(k)] = rhs / (k * (k + 2.0));
  }
  SeriesLaunch s;
  s.coeffs = std::move(c);
  s.y0 = y0;
  return s;
}

RadialFunction integrate_radial_ode(const RadialRhs& rhs, const SeriesLaunch& launch, const RadialGrid& grid,
                                    const OdeOptions& opt) {
  const std::size_t n = grid.size();
  std::vector<double> u(n), du(n);
  DormandPrince<2> dp(
      [&rhs](double y, const std::array<double, 2>& s, std::array<double, 2>& d) {
        d[0] = s[1];
        d[1] = rhs(y, s[0], s[1]);
      },
      opt);
  double y = launch.y0;
  std::array<double, 2> s{launch.value(y), launch.derivative(y)};
  for (std::size_t i = 0; i < n; ++i) {
    const double target = grid[i];
    if (target <= launch.y0) {
      if (target == 0.0) {
        u[i] = launch.lowest_power == 0 ? launch.coeffs.at(0) : launch.value(target);
        du[i] = 0.0;
      } else {
        u[i] = launch.value(target);
        du[i] = launch.derivative(target);
      }
      continue;
    }
    dp.advance(y, s, target);
    if (!std::isfinite(s[0]) || !std::isfinite(s[1])) {
      raise(ErrorCode::non_finite_state, "radial solution overflowed at y = " + std::to_string(target));
    }
    u[i] = s[0];
    du[i] = s[1];
  }
  return RadialFunction(grid, std::move(u), std::move(du));
}

}  // namespace critwave
