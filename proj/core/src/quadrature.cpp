#include "critwave/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "critwave/error.hpp"

namespace critwave {

namespace {

double weighted(const RadialGrid& g, std::span<const double> f, std::size_t i, bool y3) {
  const double v = f[i];
  if (!std::isfinite(v)) raise(ErrorCode::non_finite_state, "non-finite integrand at node " + std::to_string(i));
  if (!y3) return v;
  const double y = g[i];
  return v * y * y * y;
}

}  // namespace

double quadrature(const RadialGrid& grid, std::span<const double> f, bool y3_weight, Rule rule) {
  if (f.size() != grid.size()) raise(ErrorCode::domain_error, "integrand size does not match grid");
  const std::size_t n = grid.size();
  double s = 0.0;
  if (rule == Rule::trapezoid) {
    double prev = weighted(grid, f, 0, y3_weight);
    for (std::size_t i = 1; i < n; ++i) {
      const double cur = weighted(grid, f, i, y3_weight);
      s += 0.5 * (grid[i] - grid[i - 1]) * (prev + cur);
      prev = cur;
    }
    return s;
  }
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = grid[i + 1] - grid[i];
    const double h1 = grid[i + 2] - grid[i + 1];
    const double f0 = weighted(grid, f, i, y3_weight);
    const double f1 = weighted(grid, f, i + 1, y3_weight);
    const double f2 = weighted(grid, f, i + 2, y3_weight);
    s += (h0 + h1) / 6.0 *
         ((2.0 - h1 / h0) * f0 + (h0 + h1) * (h0 + h1) / (h0 * h1) * f1 + (2.0 - h0 / h1) * f2);
  }
  if (i + 1 < n) {
    // Odd interval count: last interval from the quadratic through three nodes.
    const double h0 = grid[i] - grid[i - 1];
    const double h1 = grid[i + 1] - grid[i];
    const double f0 = weighted(grid, f, i - 1, y3_weight);
    const double f1 = weighted(grid, f, i, y3_weight);
    const double f2 = weighted(grid, f, i + 1, y3_weight);
    s += (2 * h1 * h1 + 3 * h0 * h1) / (6 * (h0 + h1)) * f2 + (h1 * h1 + 3 * h0 * h1) / (6 * h0) * f1 -
         h1 * h1 * h1 / (6 * h0 * (h0 + h1)) * f0;
  }
  return s;
}

double quadrature(const RadialFunction& f, bool y3_weight, Rule rule) {
  return quadrature(f.grid, f.value, y3_weight, rule);
}

std::vector<double> cumulative_quadrature(const RadialGrid& grid, std::span<const double> f, bool y3_weight) {
  std::vector<double> out(grid.size(), 0.0);
  double prev = weighted(grid, f, 0, y3_weight);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = weighted(grid, f, i, y3_weight);
    out[i] = out[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (prev + cur);
    prev = cur;
  }
  return out;
}

GaussLegendre::GaussLegendre(int n) : x_(static_cast<std::size_t>(n)), w_(static_cast<std::size_t>(n)) {
  // Newton iteration on P_n from the Chebyshev-like initial guesses.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    x_[static_cast<std::size_t>(i)] = x;
    w_[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double GaussLegendre::integrate(const std::function<double(double)>& f, double a, double b) const {
  const double m = 0.5 * (a + b), r = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) s += w_[i] * f(m + r * x_[i]);
  return s * r;
}

double integrate_panels(const std::function<double(double)>& f, std::span<const double> breaks,
                        const GaussLegendre& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) s += rule.integrate(f, breaks[i], breaks[i + 1]);
  if (!std::isfinite(s)) raise(ErrorCode::non_finite_state, "panel integral not finite");
  return s;
}

std::vector<double> geometric_breaks(double a, double b, double first_width, double growth) {
  std::vector<double> e{a};
  double w = first_width;
  while (e.back() + w < b) {
    e.push_back(e.back() + w);
    w *= growth;
  }
  if (b - e.back() < 0.3 * w && e.size() > 1) e.back() = b;
  else e.push_back(b);
  return e;
}

}  // namespace critwave
