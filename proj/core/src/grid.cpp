#include "critwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "critwave/error.hpp"
#include "critwave/roots.hpp"

namespace critwave {

namespace {

void validate(const std::vector<double>& nodes) {
  if (nodes.size() < 16) raise(ErrorCode::domain_error, "grid needs at least 16 nodes");
  if (nodes.front() < 0.0) raise(ErrorCode::domain_error, "grid starts below zero");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) {
      raise(ErrorCode::domain_error, "grid nodes not strictly increasing at " + std::to_string(i));
    }
  }
}

}  // namespace

RadialGrid::RadialGrid(std::vector<double> nodes, Grading g, double ratio)
    : grading_(g), ratio_(ratio) {
  validate(nodes);
  nodes_ = std::make_shared<const std::vector<double>>(std::move(nodes));
}

RadialGrid RadialGrid::uniform(double r_min, double r_max, std::size_t n) {
  if (!(r_max > r_min)) raise(ErrorCode::domain_error, "uniform grid needs r_max > r_min");
  std::vector<double> x(n);
  const double h = (r_max - r_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = r_min + h * static_cast<double>(i);
  x.back() = r_max;
  return RadialGrid(std::move(x), Grading::uniform, 1.0);
}

RadialGrid RadialGrid::geometric(double r_min, double r_max, std::size_t n, double ratio) {
  if (!(r_max > r_min)) raise(ErrorCode::domain_error, "geometric grid needs r_max > r_min");
  if (!(ratio > 0.0)) raise(ErrorCode::domain_error, "geometric ratio must be positive");
  if (n < 2) raise(ErrorCode::domain_error, "geometric grid needs nodes");
  std::vector<double> x(n);
  const auto m = static_cast<double>(n - 1);
  const double total = std::abs(ratio - 1.0) < 1e-14 ? m : std::expm1(m * std::log(ratio)) / (ratio - 1.0);
  const double h0 = (r_max - r_min) / total;
  double h = h0;
  x[0] = r_min;
  for (std::size_t i = 1; i < n; ++i) {
    x[i] = x[i - 1] + h;
    h *= ratio;
  }
  x.back() = r_max;
  return RadialGrid(std::move(x), Grading::geometric, ratio);
}

RadialGrid RadialGrid::geometric_first_step(double r_min, double r_max, std::size_t n, double h0) {
  const double span = r_max - r_min;
  const auto m = static_cast<double>(n - 1);
  if (!(h0 > 0.0) || h0 * m >= span) return uniform(r_min, r_max, n);
  // Solve h0 * (q^m - 1)/(q - 1) = span for q > 1, in log q.
  auto mismatch = [&](double lq) {
    return std::log(h0) + m * lq + std::log(-std::expm1(-m * lq)) - std::log(std::expm1(lq)) - std::log(span);
  };
  double hi = 1.0;
  while (mismatch(hi) < 0.0) hi *= 2.0;
  const double lq = find_root(mismatch, {1e-14, hi}, 1e-15).root;
  return geometric(r_min, r_max, n, std::exp(lq));
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes) {
  return RadialGrid(std::move(nodes), Grading::explicit_nodes, 1.0);
}

std::size_t RadialGrid::locate(double y) const {
  const auto& x = *nodes_;
  auto it = std::upper_bound(x.begin(), x.end(), y);
  std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  return std::min(i, x.size() - 2);
}

RadialGrid RadialGrid::refined() const {
  const auto& x = *nodes_;
  std::vector<double> y;
  y.reserve(2 * x.size() - 1);
  if (grading_ == Grading::geometric) {
    // Split h_i = h0 q^i into h0' q'^{2i} (1 + q') with q' = sqrt(q): the refined
    // grid is again geometric and nests the old one.
    const double q = std::sqrt(ratio_);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double h = x[i + 1] - x[i];
      y.push_back(x[i]);
      y.push_back(x[i] + h / (1.0 + q));
    }
    y.push_back(x.back());
    return RadialGrid(std::move(y), Grading::geometric, q);
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    y.push_back(x[i]);
    y.push_back(0.5 * (x[i] + x[i + 1]));
  }
  y.push_back(x.back());
  return RadialGrid(std::move(y), grading_, ratio_);
}

double RadialGrid::min_spacing() const {
  const auto& x = *nodes_;
  double h = x[1] - x[0];
  for (std::size_t i = 2; i < x.size(); ++i) h = std::min(h, x[i] - x[i - 1]);
  return h;
}

double TailLaw::operator()(double y) const {
  if (coefficient == 0.0) return 0.0;
  double v = coefficient * std::pow(y, power);
  if (log_power != 0.0) v *= std::pow(std::log(y), log_power);
  return v;
}

RadialFunction::RadialFunction(RadialGrid g, std::vector<double> v, std::vector<double> d, TailLaw t)
    : grid(std::move(g)), value(std::move(v)), deriv(std::move(d)), tail(t) {
  if (value.size() != grid.size()) raise(ErrorCode::domain_error, "value size does not match grid");
  if (!deriv.empty() && deriv.size() != grid.size()) {
    raise(ErrorCode::domain_error, "derivative size does not match grid");
  }
}

double RadialFunction::operator()(double y) const {
  if (y <= grid.r_min()) return value.front();
  if (y > grid.r_max()) return tail(y);
  const std::size_t i = grid.locate(y);
  const double x0 = grid[i];
  const double h = grid[i + 1] - x0;
  const double t = (y - x0) / h;
  if (deriv.empty()) return value[i] + t * (value[i + 1] - value[i]);
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * value[i] + (t3 - 2 * t2 + t) * h * deriv[i] +
         (-2 * t3 + 3 * t2) * value[i + 1] + (t3 - t2) * h * deriv[i + 1];
}

double RadialFunction::derivative(double y) const {
  if (y <= grid.r_min()) return deriv.empty() ? 0.0 : deriv.front();
  if (y > grid.r_max()) {
    const double e = 1e-6 * y;
    return (tail(y + e) - tail(y - e)) / (2 * e);
  }
  const std::size_t i = grid.locate(y);
  const double x0 = grid[i];
  const double h = grid[i + 1] - x0;
  const double t = (y - x0) / h;
  if (deriv.empty()) return (value[i + 1] - value[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * value[i] + (-6 * t2 + 6 * t) * value[i + 1]) / h +
         (3 * t2 - 4 * t + 1) * deriv[i] + (3 * t2 - 2 * t) * deriv[i + 1];
}

}  // namespace critwave
