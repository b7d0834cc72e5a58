#include "critwave/groundstate.hpp"

#include <algorithm>
#include <cmath>

#include "critwave/differentiate.hpp"
#include "critwave/error.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {

namespace {

// Everything is rational in t = y^2/8. With d/dy = (y/4) d/dt and
// d2/dy2 = (1/4) d/dt + (t/2) d2/dt2, t-jets convert to y-jets.
Jet from_t(double y, double t, double f, double ft, double ftt) {
  return {f, 0.25 * y * ft, 0.25 * ft + 0.5 * t * ftt};
}

}  // namespace

GroundStateValue eval_ground_family(double y) {
  const double t = y * y / 8.0;
  const double p = 1.0 + t;
  const double p2 = p * p, p3 = p2 * p, p4 = p3 * p, p5 = p4 * p;
  GroundStateValue g;
  g.y = y;
  g.Q = from_t(y, t, 1.0 / p, -1.0 / p2, 2.0 / p3);
  g.LQ = from_t(y, t, (1.0 - t) / p2, (t - 3.0) / p3, (10.0 - 2.0 * t) / p4);
  g.Phi = from_t(y, t, (2.0 - 6.0 * t) / p3, (12.0 * t - 12.0) / p4, (60.0 - 36.0 * t) / p5);
  g.V = from_t(y, t, 3.0 / p2, -6.0 / p3, 18.0 / p4);
  g.W = from_t(y, t, (6.0 - 12.0 * t) / p3, (24.0 * t - 30.0) / p4, (144.0 - 72.0 * t) / p5);
  return g;
}

double ground_Q(double y) { return 1.0 / (1.0 + y * y / 8.0); }

double lambda_Q(double y) {
  const double t = y * y / 8.0;
  return (1.0 - t) / ((1.0 + t) * (1.0 + t));
}

double phi_DLQ(double y) {
  const double t = y * y / 8.0;
  const double p = 1.0 + t;
  return (2.0 - 6.0 * t) / (p * p * p);
}

double potential_V(double y) {
  const double q = ground_Q(y);
  return 3.0 * q * q;
}

double potential_W(double y) {
  const double t = y * y / 8.0;
  const double p = 1.0 + t;
  return (6.0 - 12.0 * t) / (p * p * p);
}

double potential_W_hat(double y) {
  const double t = y * y / 8.0;
  const double p = 1.0 + t;
  return -12.0 * t / (p * p * p);
}

SeriesLaunch gamma_launch(double y0) {
  SeriesLaunch s;
  s.lowest_power = -2;
  // powers -2 .. 6
  s.coeffs = {0.5, 0.0, 0.0, 0.0, -21.0 / 128.0, 0.0, 43.0 / 1024.0, 0.0, -65.0 / 8192.0};
  const double a = -0.75;
  s.log_coeffs = {a, 0.0, -3.0 / 8.0 * a, 0.0, 5.0 / 64.0 * a, 0.0, -7.0 / 512.0 * a};
  s.y0 = y0;
  return s;
}

GammaFunction compute_gamma(const RadialGrid& grid, double tol, const OdeOptions& opt) {
  if (grid.r_min() <= 0.0) raise(ErrorCode::domain_error, "Gamma is singular at the origin; grid must start at y > 0");
  const auto launch = gamma_launch();
  auto rhs = [](double y, double u, double du) { return -3.0 / y * du - potential_V(y) * u; };
  GammaFunction g{integrate_radial_ode(rhs, launch, grid, opt), 0.0};
  g.gamma.tail = TailLaw{0.0, 0.0, 1.0 / 16.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = grid[i];
    if (y == 0.0) continue;
    const auto v = eval_ground_family(y);
    const double w = y * y * y * (g.gamma.deriv[i] * v.LQ.f - g.gamma.value[i] * v.LQ.d1);
    g.wronskian_drift = std::max(g.wronskian_drift, std::abs(w + 1.0));
  }
  if (g.wronskian_drift > tol) {
    raise(ErrorCode::wronskian_drift, "Wronskian drift " + std::to_string(g.wronskian_drift));
  }
  return g;
}

PohozaevResult pohozaev_constant(double radius, std::size_t nodes, Rule rule) {
  const auto grid = RadialGrid::geometric_first_step(0.0, radius, nodes, std::min(1e-3, radius / nodes));
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = phi_DLQ(grid[i]) * lambda_Q(grid[i]);
  PohozaevResult r;
  r.radius = radius;
  const double trap = quadrature(grid, f, true, Rule::trapezoid);
  const double simpson = quadrature(grid, f, true, Rule::simpson);
  r.truncated = rule == Rule::trapezoid ? trap : simpson;
  r.tail_correction = 1536.0 / (radius * radius);
  r.value = r.truncated + r.tail_correction;
  // Next tail order is -608 * 64 / R^4.
  r.error_bar = std::abs(simpson - trap) + 608.0 * 64.0 / std::pow(radius, 4);
  r.finite = std::isfinite(r.value);
  return r;
}

ResidualNorms check_resonance(const RadialGrid& grid, ResonanceTarget target) {
  const std::size_t n = grid.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = target == ResonanceTarget::lambda_Q ? lambda_Q(grid[i]) : phi_DLQ(grid[i]);
  }
  const auto d = fd_derivatives(grid, u);
  ResidualNorms r;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = grid[i];
    if (y == 0.0) continue;
    const auto g = eval_ground_family(y);
    double res = -d.d2[i] - 3.0 / y * d.d1[i] - g.V.f * u[i];
    if (target == ResonanceTarget::phi) res -= (2.0 * g.V.f + y * g.V.d1) * g.LQ.f;
    r.max = std::max(r.max, std::abs(res));
    sum += res * res;
    ++count;
  }
  r.l2 = count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
  return r;
}

}  // namespace critwave
