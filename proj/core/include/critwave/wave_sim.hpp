#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "critwave/blowup_law.hpp"
#include "critwave/grid.hpp"
#include "critwave/profile.hpp"
#include "critwave/spectral.hpp"

namespace critwave {

// Geometric grid on [0, r_max] with the given first spacing.
struct WaveGridSpec {
  std::size_t nodes = 8000;
  double h0 = 0.01;
  double r_max = 100.0;
};
RadialGrid wave_grid(const WaveGridSpec& spec);

// Finite-volume radial Laplacian on dual cells [m_{i-1/2}, m_{i+1/2}] with
// the r^3 weight; the cell at the origin gives 4 u''(0). The last node is
// frozen (Dirichlet), so apply() writes zero there.
class RadialLaplacian {
 public:
  explicit RadialLaplacian(RadialGrid grid);
  void apply(std::span<const double> u, std::span<double> out) const;
  // sum_i w_i f_i over the free nodes.
  double mass(std::span<const double> f) const;
  // (1/2) sum m^3 (u_{i+1} - u_i)^2 / h_i over the faces covered by u (a prefix is allowed).
  double gradient_energy(std::span<const double> u) const;
  const RadialGrid& grid() const { return grid_; }
  std::span<const double> volumes() const { return volume_; }

 private:
  RadialGrid grid_;
  std::vector<double> volume_, conductance_;  // cell volume, m^3/h at each face
};

struct WaveState {
  RadialGrid grid;
  std::vector<double> u, ut;
  double t = 0.0;
  double cfl = 0.5;
};

enum class TimeScheme { rk4, leapfrog };

// Method of lines for u_tt = Lap u + u^3 (or Lap u when linear).
class WaveSolver {
 public:
  WaveSolver(WaveState state, TimeScheme scheme = TimeScheme::rk4, bool nonlinear = true);
  // Raises CFLViolation when dt > cfl * min spacing, NonFiniteState on overflow.
  void step(double dt);
  void advance(double dt, std::size_t steps);
  double default_dt() const { return state_.cfl * min_spacing_; }
  // (1/2) sum w ut^2 + gradient energy - (1/4) sum w u^4 (quartic term dropped when linear).
  double energy() const;
  const WaveState& state() const { return state_; }
  const RadialLaplacian& laplacian() const { return lap_; }

 private:
  void acceleration(std::span<const double> u, std::span<double> out) const;
  WaveState state_;
  TimeScheme scheme_;
  bool nonlinear_;
  RadialLaplacian lap_;
  double min_spacing_;
  std::vector<double> k_[8], tmp_u_, tmp_v_;
};

struct HygieneOptions {
  std::vector<std::size_t> drift_nodes{2000, 4000, 8000};  // static Q, first spacing 80 / nodes
  double drift_r_max = 100.0;
  double drift_time = 1.0;
  std::size_t energy_steps = 10000;  // 1e-3 Gaussian at r = 5, 4000 nodes to r = 400, first spacing 0.01
  double leak_time = 20.0;           // 1e-2 bump on [1, 5], 8000 nodes to r = 100
  std::vector<double> leak_margins{0.0, 0.25, 0.5};
  double cfl = 0.5;
};

struct HygieneReport {
  std::vector<double> drift;         // max |u - Q| at drift_time, per grid
  std::vector<double> truncation;    // max |L_h Q + Q^3| on the free nodes, per grid
  std::vector<double> drift_ratio;   // drift on grid k over grid k + 1
  bool drift_bounded = false;        // every drift <= truncation t^2 / 2 and every ratio >= 3
  double energy_drift_rk4 = 0.0;     // max relative energy change
  double energy_drift_leapfrog = 0.0;
  std::vector<double> leak;          // max |u| on r > 5 + t + margin, per margin
};

// Static ground state drift, small-amplitude energy conservation and the
// leak past the light cone.
HygieneReport solver_hygiene(const HygieneOptions& opt = {});

// Profile data shared by initialisation, extraction and the mode projection:
// psi, the constraint constant c0 = (Q, chi_M Phi), and P_{B1(b)} tabulated on
// a b-grid around b0 with cubic interpolation in b.
class ModulationContext {
 public:
  struct Options {
    double M = 20.0;
    double b_low = 0.5;   // table span, relative to b0
    double b_high = 1.5;
    std::size_t b_nodes = 33;
    unsigned workers = 1;
  };
  ModulationContext(double b0, const Options& opt);
  explicit ModulationContext(double b0) : ModulationContext(b0, Options{}) {}

  double b0() const { return b0_; }
  double M() const { return opt_.M; }
  double zeta() const { return psi_.zeta; }
  const EigenPair& psi() const { return psi_; }
  double psi_norm2() const { return psi_norm2_; }
  double c0() const { return c0_; }
  const ProfileBundle& initial_profile() const;
  bool in_table(double b) const;

  // (P_{B1(b)}, psi) and (d_b P_{B1(b)}, psi)
  double P_psi(double b) const;
  double dbP_psi(double b) const;
  // P_{B1(b)}(y) and its y-derivative, interpolated in b.
  double P(double b, double y) const;
  double dP(double b, double y) const;
  double dbP(double b, double y) const;

  // w = chi_M Phi and its derivative.
  double weight(double y) const;
  double weight_d1(double y) const;

 private:
  struct Table;
  double b0_;
  Options opt_;
  EigenPair psi_;
  double psi_norm2_ = 0.0, c0_ = 0.0;
  std::shared_ptr<const Table> table_;
};

struct InitialData {
  double b0 = 0.02;
  double d_plus = 0.0;
  std::function<double(double)> eta0, eta1;  // empty means zero
};

struct InitResult {
  WaveState state;
  double kappa_plus_intended = 0.0;  // (d_+ |psi|^2 / 2)(1 + b0/sqrt(zeta))
};

// u0 = P_{B1(b0)} + eta0 + d_+ psi, u1 = b0 Lambda P_{B1(b0)} + eta1 at lambda = 1.
// Raises GridTooShort if r_max < 2 B1(b0) + t_run.
InitResult init_data(const InitialData& data, const ModulationContext& ctx, const WaveGridSpec& grid,
                     double t_run, double cfl = 0.5);

struct NewtonOptions {
  double tol = 1e-13;           // relative step in lambda
  int max_iter = 50;
  double max_log_step = 0.5;    // safeguard on |log(lambda_new / lambda)|
};

struct Extraction {
  double lambda = 0.0;
  double b = 0.0;
  int iterations = 0;
  double constraint = 0.0;      // (eps, chi_M Phi) after the solve
  double eps_psi = 0.0;         // a = (eps, psi)
  double ds_eps_psi = 0.0;      // (d_s eps + b_s d_b P, psi) = (lambda (u_t)_{1/lambda} - b Lambda v, psi)
};

// Newton on lambda for ((u)_{1/lambda}, chi_M Phi) = c0 warm-started at
// lambda_guess; b from the quotient formula. Raises NewtonDiverged.
Extraction extract_modulation(const WaveState& state, const ModulationContext& ctx, double lambda_guess = 1.0,
                              const NewtonOptions& opt = {});

// eps = (u)_{1/lambda} - P_{B1(b)} and d_s eps + b_s d_b P on the rescaled grid r / lambda.
struct EpsilonField {
  RadialGrid grid;
  std::vector<double> eps, ds_eps;
};
EpsilonField epsilon_field(const WaveState& state, const Extraction& ex, const ModulationContext& ctx);

// kappa_pm = (1/2)[(eps,psi) pm ((d_s eps, psi) + b_s (d_b P, psi))/sqrt(zeta)].
ModeState project_modes(double eps_psi, double ds_eps_psi, double zeta, double b_s = 0.0, double dbP_psi = 0.0);
ModeState project_modes(const RadialFunction& eps, const RadialFunction& ds_eps, const EigenPair& psi,
                        double b_s = 0.0, double dbP_psi = 0.0);

// lambda^2 int [(H_lambda w_t, w_t) + (H_lambda w)^2] with w = u - (P_b)_lambda
// and w_t = u_t - d_t (P_b)_lambda, which carries b_s through b_t = b_s / lambda.
// Summed over r <= r_max - t - 1, outside the frozen boundary's influence.
double calE(const WaveState& state, const Extraction& ex, const ModulationContext& ctx, const RadialLaplacian& lap,
            double b_s = 0.0);

struct ModulationTrace {
  std::vector<double> t, s, lambda, b, b_s, kappa_plus, kappa_minus, calE, energy;
  std::vector<double> constraint;   // |(eps, chi_M Phi)| / ||eps||_{y <= 2M}
  std::vector<double> lambda_t;     // -lambda_t by centered differences, cross-check of b
  std::vector<double> kappa_plus_uncorrected;  // without the b_s (d_b P, psi) term, b_s centered
  int exit_sign = 0;                // sign of kappa_+ on exit, 0 if trapped to the horizon
  double s_exit = 0.0;
  double d_plus = 0.0;
  double kappa_plus_intended = 0.0;
};

struct SimulationOptions {
  WaveGridSpec grid{8000, 0.01, 0.0};  // r_max = 0 means 4 B1(b0)
  double cfl = 0.5;
  TimeScheme scheme = TimeScheme::rk4;
  int cadence = 10;                    // steps between extractions
  double s_horizon = 0.0;              // 0 means 20 / sqrt(zeta)
  double exit_level = 2.0;             // |kappa_+| |log b| / b^2 at exit
  bool kappa_correction = true;
  bool diagnostics = false;            // calE, energy and constraint at every extraction
};

// One trajectory from the initial data until |kappa_+| reaches exit_level
// b^2/|log b| or the horizon.
ModulationTrace run_trajectory(const InitialData& data, const ModulationContext& ctx, const SimulationOptions& opt);

struct EnvelopeFit {
  double b_max_ratio = 0.0;        // max b / b0 (trapped region: < 5)
  bool b_decreasing = false;
  bool lambda_decreasing = false;
  double K_bs = 0.0;               // max |b_s|^2 |log b|^2 / b^4
  double K_calE = 0.0;             // max calE |log b|^2 / b^4
  double K_kappa_minus = 0.0;      // max |kappa_-| |log b| / b^2
  double K_kappa_plus = 0.0;       // max |kappa_+| |log b| / b^2
};
EnvelopeFit fit_envelopes(const ModulationTrace& trace, double skip_s = 0.0);

struct GrowthFit {
  double rate = 0.0;               // slope of log |kappa_+ - kappa_+^*| in s
  double relative_error = 0.0;     // |rate / sqrt(zeta) - 1|
  double s_from = 0.0, s_to = 0.0;
};
GrowthFit fit_growth(const ModulationTrace& perturbed, const ModulationTrace& critical, double zeta,
                     double s_from = 4.0);

struct BisectOptions {
  SimulationOptions sim;
  double bracket_scale = 1.0;      // bracket [-1, 1] * scale * b0^2
  double bracket_tol = 1e-12;      // relative to b0^2
  std::size_t sweep_points = 9;
  double perturbation = 1e-6;      // relative to b0^2
  unsigned workers = 1;
};

struct BisectResult {
  double b0 = 0.0;
  double d_star = 0.0;
  double bracket_width = 0.0;
  int rounds = 0;
  std::vector<double> sweep_d;
  std::vector<int> sweep_sign;
  bool monotone = false;
  ModulationTrace critical, above, below;
  EnvelopeFit envelopes;
  GrowthFit growth_above, growth_below;
  double kappa_correction_shift = 0.0;  // max |kappa_+ with - without correction| |log b|/b^2 on the critical run
};

// Coarse sweep of d_+ (checked for a monotone exit sign), then multisection
// on the exit sign with up to `workers` concurrent trajectories per round.
// Raises NoDichotomy when the bracket ends do not exit with opposite signs.
BisectResult run_and_bisect(const ModulationContext& ctx, const BisectOptions& opt, const InitialData& base = {});

}  // namespace critwave
