#include <cmath>

#include "critwave/groundstate.hpp"
#include "critwave/quadrature.hpp"
#include "doctest.h"

using namespace critwave;

TEST_CASE("ground family at special radii") {
  const auto v0 = eval_ground_family(0.0);
  CHECK(v0.Q.f == 1.0);
  CHECK(v0.LQ.f == 1.0);
  CHECK(v0.V.f == 3.0);
  CHECK(v0.W.f == 6.0);
  const auto v = eval_ground_family(std::sqrt(8.0));
  CHECK(std::abs(v.LQ.f) <= 1e-15);
  CHECK(v.Q.f == doctest::Approx(0.5).epsilon(1e-15));
  const double y = 1e3;
  CHECK(std::abs(std::pow(y, 4) * lambda_Q(y) * lambda_Q(y) / 2.0 - 32.0) <= 0.01);
}

TEST_CASE("property: closed forms solve their equations") {
  for (double y : {0.1, 0.5, 1.0, 2.0, std::sqrt(8.0), 5.0, 30.0, 200.0}) {
    const auto v = eval_ground_family(y);
    const double lapQ = v.Q.d2 + 3.0 / y * v.Q.d1;
    CHECK(std::abs(lapQ + std::pow(v.Q.f, 3)) <= 1e-13);
    const double hLQ = -(v.LQ.d2 + 3.0 / y * v.LQ.d1) - v.V.f * v.LQ.f;
    CHECK(std::abs(hLQ) <= 1e-13);
    CHECK(v.LQ.f == doctest::Approx(v.Q.f + y * v.Q.d1).epsilon(1e-14));
    CHECK(v.Phi.f == doctest::Approx(2.0 * v.LQ.f + y * v.LQ.d1).epsilon(1e-13));
    CHECK(v.V.f == doctest::Approx(3.0 * v.Q.f * v.Q.f).epsilon(1e-14));
    CHECK(v.W.f == doctest::Approx(potential_W(y)).epsilon(1e-14));
  }
}

TEST_CASE("tail laws") {
  const double y = 1e4;
  CHECK(y * y * lambda_Q(y) == doctest::Approx(-8.0).epsilon(1e-6));
  double prev = std::abs(std::pow(50.0, 4) * phi_DLQ(50.0));
  for (double r = 60.0; r <= 1e4; r *= 1.2) {
    const double cur = std::abs(std::pow(r, 4) * phi_DLQ(r));
    REQUIRE(cur < 384.0);
    REQUIRE(cur >= prev);
    prev = cur;
  }
  CHECK(std::pow(1e4, 4) * phi_DLQ(1e4) == doctest::Approx(-384.0).epsilon(1e-5));
  CHECK(std::pow(1e3, 4) * potential_W(1e3) == doctest::Approx(-768.0).epsilon(0.01));
  CHECK(potential_W(std::sqrt(8.0)) == doctest::Approx(-0.75).epsilon(1e-14));
}

TEST_CASE("Gamma: Wronskian, origin behaviour, tail and the closed form") {
  const auto grid = RadialGrid::geometric_first_step(1e-2, 1e3, 6000, 1e-3);
  const auto g = compute_gamma(grid);
  CHECK(g.wronskian_drift <= 1e-8);
  const auto v1 = eval_ground_family(1.0);
  const double w = g.gamma.derivative(1.0) * v1.LQ.f - g.gamma(1.0) * v1.LQ.d1;
  CHECK(w == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(std::abs(1e-4 * g.gamma.value.front() - 0.5) <= 1e-3);
  CHECK(std::abs(g.gamma(1e3) - g.gamma(1e2)) <= 1e-2);

  // Gamma = -LQ int_1^y ds / (s^3 LQ^2) + (481/896) LQ away from the zero of LQ.
  const GaussLegendre gl(40);
  for (double y : {0.5, 2.0}) {
    const double I = gl.integrate([](double s) { return 1.0 / (s * s * s * lambda_Q(s) * lambda_Q(s)); }, 1.0, y);
    const double closed = -lambda_Q(y) * I + 481.0 / 896.0 * lambda_Q(y);
    CHECK(g.gamma(y) == doctest::Approx(closed).epsilon(1e-8));
  }

  // Smooth through y = sqrt 8: the tabulated slope matches a centered difference.
  const double y0 = std::sqrt(8.0), d = 1e-4;
  CHECK(g.gamma.derivative(y0) == doctest::Approx((g.gamma(y0 + d) - g.gamma(y0 - d)) / (2.0 * d)).epsilon(1e-6));
}

TEST_CASE("Gamma needs a grid away from the origin") {
  CHECK_THROWS_AS(compute_gamma(RadialGrid::uniform(0.0, 1.0, 11)), NumericalError);
}

TEST_CASE("Pohozaev constant") {
  const auto p = pohozaev_constant();
  CHECK(p.finite);
  CHECK(std::abs(p.value - 32.0) <= 1e-3);
  CHECK(p.value == doctest::Approx(32.000034).epsilon(1e-7));
  CHECK(std::abs(pohozaev_constant(1e4, 4000, Rule::simpson).value - 32.0) <= 1e-8);
  CHECK(std::abs(pohozaev_constant(1e2).value - 32.0) <= 1e-2);
}

TEST_CASE("resonance residuals") {
  const auto g = RadialGrid::geometric_first_step(0.1, 50.0, 4000, 3e-3);
  const auto r = check_resonance(g);
  CHECK(r.max <= 1e-6);
  const auto rf = check_resonance(g.refined());
  CHECK(r.max / rf.max >= 3.0);
  CHECK(check_resonance(g, ResonanceTarget::phi).max <= 1e-6);
}
