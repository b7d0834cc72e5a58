#pragma once

#include <array>
#include <vector>

#include "critwave/ode.hpp"

namespace critwave {

struct GResult {
  double b = 0.0;
  double G = 0.0;
  double leading = 0.0;     // b |Lambda P~_{B0}|^2
  double integral = 0.0;    // int_0^b b' (d_b P~, Lambda P~) db'
  double normalized = 0.0;  // G / (64 b |log b|)
};

// P~_{B0} = chi_{B0/4} Q with B0 = 2/b.
GResult G_functional(double b);
// (d_b P~_{B0}, Lambda P~_{B0}) and |Lambda P~_{B0}|^2.
double dbP_tilde_dot_lambda(double b);
double lambda_P_tilde_norm2(double b);

enum class ReducedMode { J_ode, b_ode };
enum class Termination { s_max, floor_reached };

struct ReducedOptions {
  double s_max = 1e6;
  double b_floor = 1e-12;
  std::size_t samples = 2000;  // log-spaced in 1 + s
  OdeOptions ode{1e-11, 1e-300, 0.0, 20'000'000};
};

struct BlowupTrajectory {
  ReducedMode mode = ReducedMode::b_ode;
  std::vector<double> s, b, log_lambda, J;
  std::vector<double> T_minus_t;  // int_s^inf lambda ds' (tail closed with lambda/b)
  std::vector<double> t;          // T - (T - t)
  double T = 0.0;
  Termination termination = Termination::s_max;
  double b_law_ratio = 0.0;       // b s / (2 log s) at the last sample
  double lambda_law_ratio = 0.0;  // -log lambda / (log s)^2 at the last sample
  double lambda_fit_slope = 0.0;  // d(-log lambda)/d((log s)^2) over the last decade
  double speed_law_ratio = 0.0;   // log lambda / log[(T-t) exp(-sqrt|log(T-t)|)] at the last sample
  double scaling_bound = 0.0;     // max lambda / (T - t)
  double time_consistency = 0.0;  // max relative defect of int dt/lambda against s
};

// Solves J_s = -J^2/(128 |log J|^2) with b = J/(64 |log J|), or directly
// b_s = -b^2/(2 |log b|), together with (log lambda)_s = -b, t_s = lambda.
BlowupTrajectory integrate_reduced_system(double b0, ReducedMode mode, const ReducedOptions& opt = {});

// J with J/(64 |log J|) = b.
double J_from_b(double b);

// kappa_+ and kappa_- coordinates along V_pm = (1, pm sqrt(zeta)).
struct ModeState {
  double kappa_plus = 0.0;
  double kappa_minus = 0.0;
};

// (a, a_s) with a = (eps, psi)  <->  kappa_pm = (a pm a_s / sqrt(zeta)) / 2.
ModeState modes_from_raw(double a, double a_s, double zeta);
std::array<double, 2> raw_from_modes(const ModeState& m, double zeta);

// Exact step of kappa_+' = sqrt(zeta) kappa_+ + E_+/(2 sqrt(zeta)),
// kappa_-' = -sqrt(zeta) kappa_- - E_-/(2 sqrt(zeta)) with forcing held fixed.
ModeState linear_mode_step(const ModeState& state, double ds, std::array<double, 2> forcing, double zeta);

struct DichotomyOptions {
  double zeta = 0.5860808922484;
  double s_max = 200.0;
  double check_ds = 0.05;
  double bracket_tol = 1e-12;  // relative to b0^2
  bool forcing_on = true;
  OdeOptions ode{1e-12, 1e-30, 0.0, 20'000'000};
};

struct ExitRecord {
  int sign = 0;             // +1 / -1 on exit, 0 if trapped until s_max
  double s_exit = 0.0;
  double b_exit = 0.0;
  double max_kappa_minus = 0.0;  // max |kappa_-| |log b| / b^2 along the run
};

// Toy (b, kappa_+, kappa_-) system with forcing sqrt(b) b^2/|log b| (sin s, cos s).
ExitRecord run_mode_toy(double b0, double a_plus, const DichotomyOptions& opt = {});

struct DichotomyResult {
  double b0 = 0.0;
  double a_star = 0.0;
  double a_star_duhamel = 0.0;   // -int_0^s_max e^{-k s} E_+/(2k) ds
  double bracket_width = 0.0;
  int bisection_steps = 0;
  ExitRecord at_star, above, below;  // a* and a* pm 1e-6 b0^2
  double predicted_exit = 0.0;       // log(bound / 1e-6 b0^2) / sqrt(zeta)
  double scaled_a_star = 0.0;        // a* |log b0| / b0^2
};

// Bisects kappa_+(0) over [-b0^2/|log b0|, b0^2/|log b0|] on the exit sign.
DichotomyResult dichotomy_demo(double b0, const DichotomyOptions& opt = {});

}  // namespace critwave
