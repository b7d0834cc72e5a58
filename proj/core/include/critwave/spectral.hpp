#pragma once

#include "critwave/grid.hpp"
#include "critwave/ode.hpp"
#include "critwave/roots.hpp"

namespace critwave {

// -u'' - (3/y) u' - V u at every node; the origin uses -4 u''(0) - V(0) u(0).
// The tabulated derivative is used when present, finite differences otherwise.
RadialFunction apply_H(const RadialFunction& u);

enum class Normalization { origin_value, unit_l2 };

struct EigenOptions {
  double shoot_radius = 18.0;
  double match_radius = 10.0;
  double trust_radius = 30.0;
  double zeta_tol = 1e-12;
  Normalization normalization = Normalization::origin_value;
  OdeOptions ode{1e-12, 1e-16, 0.0, 20'000'000};
};

struct EigenPair {
  double zeta = 0.0;
  RadialFunction psi;
  Normalization normalization = Normalization::origin_value;
  double scale = 1.0;                 // psi relative to the psi(0) = 1 solution
  double eigen_residual = 0.0;        // ||H psi + zeta psi|| / ||psi|| on the trust region
  double lq_overlap = 0.0;            // |(psi, LQ)| / (||psi|| ||LQ||) on y <= trust radius
  double log_derivative_mismatch = 0.0;
  double decay_slope = 0.0;           // max relative slope of psi r^{3/2} e^{sqrt(zeta) r} on [10, 15]
  double bare_decay_slope = 0.0;      // same for psi e^{sqrt(zeta) r}
  double instability_radius = 0.0;    // where the plain outward solution leaves the decaying branch
  int bisection_steps = 0;
};

// Shooting mismatch psi'(R) + (sqrt(zeta) + 3/(2R)) psi(R) of the outward
// solution with psi(0) = 1, psi'(0) = 0.
double eigen_mismatch(double zeta, double shoot_radius, const OdeOptions& opt = {});

EigenPair solve_eigenpair(Bracket bracket = {0.3, 0.9}, const RadialGrid* grid = nullptr,
                          const EigenOptions& opt = {});

// Default tabulation grid for psi: uniform on [0, trust radius].
RadialGrid eigen_grid(double trust_radius = 30.0, std::size_t nodes = 4000);

}  // namespace critwave
