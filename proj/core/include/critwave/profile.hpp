#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "critwave/cutoff.hpp"
#include "critwave/grid.hpp"
#include "critwave/ode.hpp"

namespace critwave {

struct ProfileOptions {
  double M = 20.0;
  std::size_t nodes = 4000;
  double first_step = 1e-3;
  double reach = 4.0;           // grid extends to reach * B1
  double switch_radius = 1.0;   // direct Green formula below, tail-integral form above
  double orthogonality_tol = 1e-6;
  bool with_db = true;          // also assemble dP/db
  OdeOptions ode{1e-12, 1e-15, 0.0, 20'000'000};
};

struct Scales {
  double b, B0, B1;
  explicit Scales(double b_);
  double log_b() const;  // |log b|
};

struct CbResult {
  double cb = 0.0;
  double numerator = 0.0;     // (D Lambda Q, Lambda Q)
  double denominator = 0.0;   // (chi_{B0/4} Lambda Q, Lambda Q)
  double offset = 0.0;        // denominator - 64 log(B0/4)
  double normalized = 0.0;    // cb * 2|log b|
};

CbResult compute_cb(double b);

// d/db of the denominator of c_b.
double cb_denominator_db(double b);

// Solution of H w = F from the Green formula with the two kernel elements,
// tabulated with w' and w''.
struct GreenSolution {
  std::vector<double> w, dw, d2w;
  double projection_LQ = 0.0;   // (F, Lambda Q) seen by the forward sweep
  double switch_jump = 0.0;     // |direct - tail form| at the switch radius
  double chi_m_phi_moment = 0.0;  // (w, chi_M Phi)
};

// far_tail is the integral of F Lambda Q y^3 beyond the last node.
GreenSolution solve_H_green(const std::function<double(double)>& F, const RadialGrid& grid, double far_tail,
                            double M, double switch_radius, const OdeOptions& opt);

// (chi_M Phi, Lambda Q)
double chi_m_phi_lambda_q(double M);

struct T1Result {
  RadialGrid grid;
  std::vector<double> T1, dT1, d2T1;
  double b = 0.0, M = 0.0, cb = 0.0;
  double c = 0.0;                  // Lambda Q shift restoring orthogonality
  double orthogonality = 0.0;      // (T1, chi_M Phi) relative to the norm scale
  double switch_jump = 0.0;
  double projection_LQ = 0.0;
};

RadialGrid profile_grid(double b, const ProfileOptions& opt = {});

T1Result build_T1(double b, const ProfileOptions& opt = {});

struct ProfileBundle {
  double b = 0.0, B0 = 0.0, B1 = 0.0, M = 0.0;
  double cb = 0.0, c = 0.0, dc_db = 0.0;
  CbResult cb_detail;
  RadialGrid grid;
  RadialFunction T1;
  std::vector<double> d2T1;
  RadialFunction P;            // P_{B1} = Q + chi_{B1} b^2 T1
  RadialFunction Psi;          // residual of the self-similar equation
  std::optional<RadialFunction> dP_db;
  double orthogonality = 0.0;
  double switch_jump = 0.0;
};

ProfileBundle assemble_PB1(double b, const ProfileOptions& opt = {});

// Right-hand side bounds (k = 0) of the pointwise estimates for T1, dP/db and
// Psi - c_b b^2 chi_{B0/4} Lambda Q.
double envelope_T1(double y, double b, double M);
double envelope_dP(double y, double b, double M);
double envelope_Psi(double y, double b, double M);

struct FluxResult {
  double flux = 0.0;          // (Psi_{B1}, Lambda P~_{B0})
  double ratio = 0.0;         // flux / (32 b^2)
  double leading = 0.0;       // same with Psi -> c_b b^2 chi_{B0/4} Lambda Q
  double leading_ratio = 0.0;
};

// Lambda of P~_{B0} = chi_{B0/4} Q.
double lambda_P_tilde(double y, double b);

FluxResult flux_integral(const ProfileBundle& bundle);

}  // namespace critwave
