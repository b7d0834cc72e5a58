#pragma once

#include <functional>
#include <vector>

#include "critwave/grid.hpp"
#include "critwave/ode.hpp"
#include "critwave/spectral.hpp"

namespace critwave {

// -u'' - (3/r) u' + W u at every node.
RadialFunction apply_B(const RadialFunction& u);

enum class IndexPotential { W, W_hat, zero };

struct IndexReport {
  int zero_count = 0;              // sign changes of U on (0, r_max)
  std::vector<double> zeros;       // r locations (direct) or tau locations (Bessel)
  double tail_value = 0.0;         // U(r_max), the limit value for the direct route
  double tail_flatness = 0.0;      // |U(r_max) - U(r_max / 2)|
  // Bessel route only.
  int bessel_zero_count = 0;
  double C1 = 0.0, C2 = 0.0;
  double K = 0.0;                  // tau U~(tau) at tau = 1e-3
  double K_half = 0.0;             // same at tau = 5e-4
  double K_exact = 0.0;            // -2 C2 / (pi 4 sqrt 6)
  double boundary_value = 0.0;     // U~(1)
  double boundary_slope = 0.0;     // U~'(1)
  bool K_nonzero = false;
  std::vector<double> zeros_in_r;  // tau zeros mapped to r = sqrt(8 (1/tau^2 - 1))
};

// Zero-energy solution B U = 0 (or its comparison problem) with U(0) = 1,
// U'(0) = 0, integrated to the last grid node.
IndexReport count_index_direct(const RadialGrid& grid, IndexPotential potential = IndexPotential::W,
                               const OdeOptions& opt = {});
RadialFunction zero_energy_solution(const RadialGrid& grid, IndexPotential potential, const OdeOptions& opt = {});

// Reduction of the comparison problem to t^2 U'' + t U' + (96 t^2 - 1) U = 0
// on (0, 1) with U(1) = 0, U'(1) = -8.
IndexReport count_index_bessel(double tau_min = 1e-3);
double bessel_reduced_solution(double tau, double C1, double C2);

// Decay selecting the inverse: 1/r^2 for sources decaying faster than r^-4,
// log(r)/r^2 for sources with an r^-4 tail (such as Phi).
enum class InverseDecay { inverse_square, log_inverse_square };

struct InversionOptions {
  double match_radius = 300.0;
  double inner_radius = 30.0;      // uniform spacing below, geometric above
  double inner_step = 5e-3;
  std::size_t outer_nodes = 3000;
  Bracket origin_bracket{-1e3, 1e3};
  OdeOptions ode{1e-12, 1e-16, 0.0, 20'000'000};
};

struct Inversion {
  RadialFunction U;
  double origin_value = 0.0;       // shooting parameter U(0)
  double tail_functional = 0.0;    // U + r U'/2 - a/(2 r^2) at the match radius after the solve
  double tail_coefficient = 0.0;   // r^2 U (inverse square) or r^2 (r U' + 2 U) (log case) at the match radius
  double flatness = 0.0;           // relative spread of the tail diagnostic over the check window
  double corrected_flatness = 0.0; // log case: spread of r^2 U - a log r
  double residual = 0.0;           // ||B U - f|| / ||f|| on r <= inner_radius
  InverseDecay decay = InverseDecay::inverse_square;
};

// Solves B U = f with U'(0) = 0, choosing U(0) by root finding on the tail
// functional so that the constant mode vanishes at the match radius.
Inversion invert_B(const std::function<double(double)>& f, InverseDecay decay, const InversionOptions& opt = {});
Inversion invert_B(const RadialFunction& f, InverseDecay decay, const InversionOptions& opt = {});

struct GramOptions {
  double psi_radius = 18.0;        // psi-weighted products truncate here
  double tail_M = 500.0;           // K_tail from I(M) and I(2M)
};

struct GramMatrix {
  double psi_psi = 0.0;            // (B^-1 psi, psi)
  double phi_psi = 0.0;            // (B^-1 Phi, psi)
  double psi_phi = 0.0;            // (B^-1 psi, Phi), adjoint partner of phi_psi
  double phi_phi = 0.0;            // (B^-1 Phi, Phi) with the two-point tail correction
  double phi_phi_raw = 0.0;        // I(2M), uncorrected
  double phi_phi_richardson = 0.0;
  double det = 0.0;
  double K_tail = 0.0;             // two-point estimate
  double K_richardson = 0.0;       // three-point fit on (M/2, M, 2M)
  double K_richardson_low = 0.0;   // three-point fit on (M/4, M/2, M)
  double K_exact = 0.0;            // leading asymptotics of the integrand
  double invariant_ratio = 0.0;    // phi_psi^2 / (psi_psi phi_phi)
  double symmetry_defect = 0.0;    // |phi_psi - psi_phi| / |phi_psi|
  Normalization normalization = Normalization::origin_value;
  double psi_scale = 1.0;
  bool negative_definite() const { return psi_psi < 0.0 && det > 0.0; }
};

// I(M) = int_0^M (B^-1 Phi) Phi r^3 dr with the running-integral tail.
double phi_phi_partial(const Inversion& inv_phi, double M);

GramMatrix gram_matrix(const EigenPair& psi, const Inversion& inv_psi, const Inversion& inv_phi,
                       const GramOptions& opt = {});

struct HardyConstants {
  int samples = 0;
  double hardy0 = 0.0;             // worst [ (v/y)_2 + sup y|v| ] / ||v'||_2
  double hardy_h2 = 0.0;           // worst int v'^2/y^2 / int (Lap v)^2
  double hardy_log = 0.0;          // worst log-weighted ratio, R = 10
  double hardy_nolog = 0.0;        // worst ring ratio, R = 10
  double identity_constant = 0.0;  // (int (Lap v)^2 - int v''^2) / int v'^2/y^2, worst deviation from 3 kept
  double identity_defect = 0.0;    // max |constant - 3|
  double scale_variation = 0.0;    // max relative spread of the homogeneous ratios over lambda in {0.5, 1, 2}
  double scale_variation_log = 0.0;  // same for the inhomogeneous (fixed radius) ratios
  double subcoercivity_c = 0.0;    // largest c valid for every sample in the (Hu)^2 split
  double subcoercivity_identity = 0.0;  // max relative defect of the (Hu)^2 expansion
  bool all_finite = false;
};

// Fixed family of 20 smooth radial test functions.
HardyConstants hardy_spot_check();

struct CoercivityReport {
  EigenPair psi;
  IndexReport index_W, index_W_hat, index_bessel;
  Inversion inv_psi, inv_phi;
  GramMatrix gram;
};

// psi, the index solves and the Phi inversion run concurrently on up to
// max_workers threads; the psi inversion waits for psi.
CoercivityReport run_coercivity(unsigned max_workers = 4, Normalization normalization = Normalization::origin_value);

}  // namespace critwave
