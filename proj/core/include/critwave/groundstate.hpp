#pragma once

#include "critwave/grid.hpp"
#include "critwave/ode.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {

// Value with first and second y-derivatives.
struct Jet {
  double f = 0.0, d1 = 0.0, d2 = 0.0;
};

struct GroundStateValue {
  double y = 0.0;
  Jet Q, LQ, Phi, V, W;  // LQ is Lambda Q, Phi is D Lambda Q
};

// Q = 1/(1 + y^2/8) and its derived family in R^4, hand-differentiated.
GroundStateValue eval_ground_family(double y);

double ground_Q(double y);
double lambda_Q(double y);
double phi_DLQ(double y);
double potential_V(double y);
double potential_W(double y);
// Comparison potential -(3/2) y^2/(1 + y^2/8)^3 used in the index count.
double potential_W_hat(double y);

// Frobenius launch for the singular kernel element:
// 1/(2y^2) - (3/4) log(y) Lambda Q + even series with zero constant term.
SeriesLaunch gamma_launch(double y0 = 1e-3);

struct GammaFunction {
  RadialFunction gamma;
  // max over nodes of |y^3 (Gamma' LQ - Gamma LQ') + 1|
  double wronskian_drift = 0.0;
};

// Integrates H Gamma = 0 outward from the Frobenius launch. Throws
// WronskianDrift if the Wronskian leaves -1/y^3 by more than tol (relative).
GammaFunction compute_gamma(const RadialGrid& grid, double tol = 1e-7, const OdeOptions& opt = {});

struct PohozaevResult {
  double value = 0.0;
  double error_bar = 0.0;
  double truncated = 0.0;        // quadrature up to the truncation radius
  double tail_correction = 0.0;  // 1536/R^2 from the leading asymptotics
  double radius = 0.0;
  bool finite = false;
};

// (D Lambda Q, Lambda Q) by quadrature on [0, R] plus the asymptotic tail.
PohozaevResult pohozaev_constant(double radius = 1e4, std::size_t nodes = 4000, Rule rule = Rule::trapezoid);

struct ResidualNorms {
  double max = 0.0;
  double l2 = 0.0;  // root mean square over the checked nodes
};

enum class ResonanceTarget { lambda_Q, phi };

// Finite-difference residual of H(Lambda Q) = 0, or of H Phi = (2V + yV') Lambda Q.
ResidualNorms check_resonance(const RadialGrid& grid, ResonanceTarget target = ResonanceTarget::lambda_Q);

}  // namespace critwave
