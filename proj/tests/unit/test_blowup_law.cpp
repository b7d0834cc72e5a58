#include <cmath>

#include "critwave/blowup_law.hpp"
#include "doctest.h"

using namespace critwave;

namespace {
constexpr double zeta = 0.5860808922484;
}

TEST_CASE("G functional") {
  const double expect[] = {1.8292, 1.55454, 1.41591};
  const double bs[] = {1e-2, 1e-3, 1e-4};
  double prev = 1e300;
  for (int i = 0; i < 3; ++i) {
    const auto g = G_functional(bs[i]);
    CHECK(g.normalized == doctest::Approx(expect[i]).epsilon(1e-4));
    CHECK(g.normalized == doctest::Approx(g.G / (64.0 * bs[i] * std::abs(std::log(bs[i])))));
    CHECK(g.normalized < prev);
    CHECK(g.normalized > 1.0);
    prev = g.normalized;
  }
}

TEST_CASE("J from b inverts b = J/(64 |log J|)") {
  CHECK(J_from_b(0.01) == doctest::Approx(0.475614).epsilon(1e-6));
  for (double b : {1e-2, 1e-4, 1e-8}) {
    const double J = J_from_b(b);
    CHECK(J / (64.0 * std::abs(std::log(J))) == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("reduced b ode") {
  const auto tr = integrate_reduced_system(0.01, ReducedMode::b_ode);
  CHECK(tr.termination == Termination::s_max);
  CHECK(tr.b_law_ratio == doctest::Approx(0.7115).epsilon(1e-3));
  CHECK(tr.lambda_law_ratio == doctest::Approx(0.5042).epsilon(1e-3));
  CHECK(tr.time_consistency <= 1e-4);
  CHECK(tr.T > 0.0);
  for (std::size_t i = 1; i < tr.b.size(); ++i) {
    CHECK(tr.b[i] < tr.b[i - 1]);
    CHECK(tr.log_lambda[i] < tr.log_lambda[i - 1]);
    CHECK(tr.T_minus_t[i] > 0.0);
    CHECK(tr.t[i] >= tr.t[i - 1]);
  }
}

TEST_CASE("reduced J ode tracks the b ode at leading order") {
  const auto tj = integrate_reduced_system(0.01, ReducedMode::J_ode, {1e4});
  CHECK(tj.b.front() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(tj.J.front() == doctest::Approx(J_from_b(0.01)).epsilon(1e-12));
  for (std::size_t i = 1; i < tj.b.size(); ++i) CHECK(tj.b[i] < tj.b[i - 1]);
}

TEST_CASE("property: mode coordinates round trip") {
  for (double a : {-1.0, 0.0, 0.3}) {
    for (double as : {-2.0, 0.5}) {
      const auto m = modes_from_raw(a, as, zeta);
      const auto back = raw_from_modes(m, zeta);
      CHECK(back[0] == doctest::Approx(a).epsilon(1e-14));
      CHECK(back[1] == doctest::Approx(as).epsilon(1e-14));
    }
  }
}

TEST_CASE("linear mode step") {
  const double k = std::sqrt(zeta);
  const auto m = linear_mode_step({1.0, 1.0}, 2.0, {0.0, 0.0}, zeta);
  CHECK(m.kappa_plus == doctest::Approx(std::exp(2.0 * k)).epsilon(1e-14));
  CHECK(m.kappa_minus == doctest::Approx(std::exp(-2.0 * k)).epsilon(1e-14));
  // Constant forcing: kappa_+ -> e^{ks} (kappa + E/(2 zeta)) - E/(2 zeta).
  const double E = 0.3;
  const auto f = linear_mode_step({0.0, 0.0}, 1.5, {E, E}, zeta);
  CHECK(f.kappa_plus == doctest::Approx((std::exp(1.5 * k) - 1.0) * E / (2.0 * zeta)).epsilon(1e-13));
  CHECK(f.kappa_minus == doctest::Approx(-(1.0 - std::exp(-1.5 * k)) * E / (2.0 * zeta)).epsilon(1e-13));
  // Two half steps equal one full step.
  const auto h = linear_mode_step(linear_mode_step({0.2, -0.1}, 0.5, {E, -E}, zeta), 0.5, {E, -E}, zeta);
  const auto w = linear_mode_step({0.2, -0.1}, 1.0, {E, -E}, zeta);
  CHECK(h.kappa_plus == doctest::Approx(w.kappa_plus).epsilon(1e-13));
  CHECK(h.kappa_minus == doctest::Approx(w.kappa_minus).epsilon(1e-13));
}

TEST_CASE("dichotomy toy") {
  const auto d = dichotomy_demo(0.01);
  CHECK(d.a_star == doctest::Approx(-8.91627174058e-07).epsilon(1e-6));
  CHECK(std::abs(d.a_star - d.a_star_duhamel) <= 1e-12 * 0.01 * 0.01);
  CHECK(d.bracket_width < 1e-12 * 0.01 * 0.01);
  CHECK(d.above.sign == 1);
  CHECK(d.below.sign == -1);
  CHECK(d.above.s_exit == doctest::Approx(d.predicted_exit).epsilon(0.1));
  CHECK(d.below.s_exit == doctest::Approx(d.predicted_exit).epsilon(0.1));
  CHECK(d.at_star.s_exit > d.above.s_exit);
}

TEST_CASE("property: dichotomy threshold scales like b0^2/|log b0|") {
  const auto a = dichotomy_demo(1e-2);
  const auto b = dichotomy_demo(3e-3);
  const double ratio = a.scaled_a_star / b.scaled_a_star;
  CHECK(ratio > 0.5);
  CHECK(ratio < 2.0);
}

TEST_CASE("without forcing the threshold is zero") {
  DichotomyOptions opt;
  opt.forcing_on = false;
  const auto d = dichotomy_demo(1e-2, opt);
  CHECK(std::abs(d.a_star) <= 1e-12 * 1e-4);
}
