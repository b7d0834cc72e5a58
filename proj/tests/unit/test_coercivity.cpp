#include <algorithm>
#include <cmath>
#include <vector>

#include "critwave/coercivity.hpp"
#include "critwave/groundstate.hpp"
#include "doctest.h"

using namespace critwave;

namespace {

const CoercivityReport& report() {
  static const CoercivityReport r = run_coercivity(2);
  return r;
}

EigenPair scaled(const EigenPair& e, double c) {
  EigenPair s = e;
  for (auto& v : s.psi.value) v *= c;
  for (auto& v : s.psi.deriv) v *= c;
  s.scale *= c;
  return s;
}

}  // namespace

TEST_CASE("potential W") {
  CHECK(potential_W(0.0) == 6.0);
  CHECK(potential_W(std::sqrt(8.0)) == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(std::pow(1e3, 4) * potential_W(1e3) == doctest::Approx(-768.0).epsilon(0.01));
}

TEST_CASE("index by direct integration") {
  const auto grid = RadialGrid::uniform(0.0, 250.0, 25001);
  const auto w = count_index_direct(grid, IndexPotential::W);
  CHECK(w.zero_count <= 2);
  REQUIRE(w.zeros.size() == 2);
  CHECK(w.zeros[0] == doctest::Approx(5.2861281).epsilon(1e-7));
  CHECK(w.zeros[1] == doctest::Approx(22.808575).epsilon(1e-7));
  const auto h = count_index_direct(grid, IndexPotential::W_hat);
  CHECK(h.zero_count == 2);
  CHECK(h.zeros[0] == doctest::Approx(3.0703198).epsilon(1e-7));
  CHECK(h.zeros[1] == doctest::Approx(7.5243111).epsilon(1e-7));
  CHECK(h.tail_value == doctest::Approx(0.01985).epsilon(1e-3));
  const auto z = count_index_direct(grid, IndexPotential::zero);
  CHECK(z.zero_count == 0);
  CHECK(z.tail_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("index by the Bessel reduction") {
  const auto b = count_index_bessel();
  CHECK(b.bessel_zero_count == 2);
  CHECK(std::abs(b.boundary_value) <= 1e-10);
  CHECK(std::abs(b.boundary_slope + 8.0) <= 1e-8);
  CHECK(b.K_nonzero);
  CHECK(std::abs(b.K - b.K_half) <= 0.01 * std::abs(b.K));
  CHECK(b.K_exact == doctest::Approx(0.076206).epsilon(1e-4));
  CHECK(b.K == doctest::Approx(0.07624018).epsilon(1e-6));
  // Both routes see the same zeros.
  const auto h = count_index_direct(RadialGrid::uniform(0.0, 250.0, 25001), IndexPotential::W_hat);
  auto zr = b.zeros_in_r;
  std::sort(zr.begin(), zr.end());
  REQUIRE(zr.size() == h.zeros.size());
  for (std::size_t i = 0; i < h.zeros.size(); ++i) {
    CHECK(zr[i] == doctest::Approx(h.zeros[i]).epsilon(1e-6));
  }
}

TEST_CASE("inversions") {
  const auto& r = report();
  CHECK(r.inv_psi.residual <= 1e-5);
  CHECK(r.inv_psi.flatness <= 0.02);
  CHECK(r.inv_psi.origin_value == doctest::Approx(0.07256589).epsilon(1e-6));
  CHECK(r.inv_phi.residual <= 1e-5);
  CHECK(r.inv_phi.corrected_flatness <= 1e-3);
  CHECK(r.inv_phi.tail_coefficient == doctest::Approx(-192.0).epsilon(1e-2));
  CHECK(r.inv_phi.origin_value == doctest::Approx(-1.1590053).epsilon(1e-6));
  const auto doubled = invert_B(scaled(r.psi, 2.0).psi, InverseDecay::inverse_square);
  CHECK(doubled.origin_value == doctest::Approx(2.0 * r.inv_psi.origin_value).epsilon(1e-8));
  for (double x : {1.0, 10.0, 100.0}) CHECK(doubled.U(x) == doctest::Approx(2.0 * r.inv_psi.U(x)).epsilon(1e-8));
}

TEST_CASE("Gram matrix") {
  const auto& g = report().gram;
  CHECK(g.psi_psi < 0.0);
  CHECK(g.phi_phi < 0.0);
  CHECK(g.det > 0.0);
  CHECK(g.negative_definite());
  CHECK(g.invariant_ratio == doctest::Approx(0.401).epsilon(0.02 / 0.401));
  CHECK(g.symmetry_defect <= 1e-3);
  CHECK(g.psi_psi == doctest::Approx(-4.6052368).epsilon(1e-6));
  CHECK(g.phi_psi == doctest::Approx(-32.655812).epsilon(1e-6));
  CHECK(g.phi_phi == doctest::Approx(-574.20639).epsilon(1e-5));
  CHECK(g.det == doctest::Approx(1577.95).epsilon(1e-4));
  CHECK(g.K_exact == doctest::Approx(-36864.0).epsilon(1e-2));
  const double quoted_det = -4.63 * -574.25 - 32.65 * 32.65;
  CHECK(std::abs(quoted_det - 1591.0) <= 10.0);
}

TEST_CASE("property: normalization covariance of the Gram entries") {
  const auto& r = report();
  for (double c : {0.5, 2.0}) {
    const auto e = scaled(r.psi, c);
    const auto inv = invert_B(e.psi, InverseDecay::inverse_square);
    const auto g = gram_matrix(e, inv, r.inv_phi);
    CHECK(g.psi_psi == doctest::Approx(c * c * r.gram.psi_psi).epsilon(1e-7));
    CHECK(g.phi_psi == doctest::Approx(c * r.gram.phi_psi).epsilon(1e-7));
    CHECK(g.phi_phi == doctest::Approx(r.gram.phi_phi).epsilon(1e-12));
    CHECK(g.invariant_ratio == doctest::Approx(r.gram.invariant_ratio).epsilon(1e-7));
    CHECK(g.negative_definite());
  }
}

TEST_CASE("worker count does not change the result") {
  const auto one = run_coercivity(1);
  CHECK(one.gram.det == report().gram.det);
  CHECK(one.gram.phi_phi == report().gram.phi_phi);
}

TEST_CASE("Hardy spot checks") {
  const auto h = hardy_spot_check();
  CHECK(h.samples == 20);
  CHECK(h.all_finite);
  CHECK(std::abs(h.identity_constant - 3.0) <= 1e-3);
  CHECK(h.identity_defect <= 1e-3);
  CHECK(h.hardy_h2 <= 1.0 / 3.0 + 1e-6);
  CHECK(h.scale_variation <= 1e-6);
  CHECK(std::isfinite(h.hardy0));
  CHECK(h.hardy0 == doctest::Approx(1.4784).epsilon(1e-4));
  CHECK(h.subcoercivity_c == doctest::Approx(0.318209).epsilon(1e-5));
  CHECK(h.subcoercivity_identity <= 1e-8);
}
