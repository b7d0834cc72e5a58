#pragma once

#include <span>
#include <vector>

#include "critwave/grid.hpp"

namespace critwave {

// Fornberg's algorithm: weights w_j with f^(m)(x0) ~ sum_j w_j f(xs_j).
std::vector<double> fornberg_weights(double x0, std::span<const double> xs, int m);

struct Derivatives {
  std::vector<double> d1, d2;
};

// Five-point stencils on an arbitrary grid, centered in the interior and
// shifted at the ends. With even_origin, a grid starting at y = 0 is
// reflected so the stencils near the origin use f(-y) = f(y).
Derivatives fd_derivatives(const RadialGrid& grid, std::span<const double> f, bool even_origin = true);

}  // namespace critwave
