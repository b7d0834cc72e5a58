#pragma once

#include <functional>
#include <span>
#include <vector>

#include "critwave/grid.hpp"

namespace critwave {

enum class Rule { trapezoid, simpson };

// Composite rule for the integral of f(y) (times y^3 when weighted) over the
// grid span. Simpson handles nonuniform spacing pairwise.
double quadrature(const RadialGrid& grid, std::span<const double> f, bool y3_weight = true,
                  Rule rule = Rule::trapezoid);
double quadrature(const RadialFunction& f, bool y3_weight = true, Rule rule = Rule::trapezoid);

// Running trapezoid integral from the first node, same weighting convention.
std::vector<double> cumulative_quadrature(const RadialGrid& grid, std::span<const double> f, bool y3_weight = true);

// n-point Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int n = 20);
  double integrate(const std::function<double(double)>& f, double a, double b) const;
  int size() const { return static_cast<int>(x_.size()); }

 private:
  std::vector<double> x_, w_;
};

// Sum of Gauss-Legendre integrals over consecutive panels [breaks[i], breaks[i+1]].
double integrate_panels(const std::function<double(double)>& f, std::span<const double> breaks,
                        const GaussLegendre& rule);

// Panel edges a = e_0 < ... < e_n = b growing geometrically from first_width.
std::vector<double> geometric_breaks(double a, double b, double first_width, double growth = 1.15);

}  // namespace critwave
