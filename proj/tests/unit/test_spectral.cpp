#include <cmath>
#include <vector>

#include "critwave/error.hpp"
#include "critwave/groundstate.hpp"
#include "critwave/quadrature.hpp"
#include "critwave/spectral.hpp"
#include "doctest.h"

using namespace critwave;

namespace {

RadialFunction tabulate(const RadialGrid& g, double (*f)(double), bool with_deriv) {
  std::vector<double> v(g.size()), d;
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g[i]);
  if (with_deriv) {
    d.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto j = eval_ground_family(g[i]);
      d[i] = f == ground_Q ? j.Q.d1 : f == lambda_Q ? j.LQ.d1 : j.Phi.d1;
    }
  }
  return RadialFunction(g, std::move(v), std::move(d));
}

}  // namespace

TEST_CASE("apply_H on the ground family") {
  const auto g = RadialGrid::geometric_first_step(0.0, 50.0, 4000, 3e-3);
  const auto hl = apply_H(tabulate(g, lambda_Q, false));
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] >= 0.1) m = std::max(m, std::abs(hl.value[i]));
  }
  CHECK(m <= 1e-6);
  const auto hq = apply_H(tabulate(g, ground_Q, false));
  CHECK(hq.value.front() == doctest::Approx(-2.0).epsilon(1e-6));
  const auto hp = apply_H(tabulate(g, phi_DLQ, true));
  for (double y : {1.0, 3.0, 10.0}) {
    const auto v = eval_ground_family(y);
    CHECK(std::abs(hp(y) - (2.0 * v.V.f + y * v.V.d1) * v.LQ.f) <= 1e-6);
  }
}

TEST_CASE("bound state") {
  const auto e = solve_eigenpair();
  CHECK(std::abs(e.zeta - 0.5860808922) <= 1e-6);
  CHECK(e.zeta == doctest::Approx(0.5860808922484).epsilon(1e-11));
  CHECK(e.psi.value.front() == 1.0);
  CHECK(e.psi.deriv.front() == 0.0);
  CHECK(e.decay_slope <= 1e-2);
  CHECK(e.eigen_residual <= 1e-5);
  CHECK(e.lq_overlap <= 1e-4);
  CHECK(e.instability_radius > 18.0);
  CHECK(e.instability_radius < 25.0);
  for (std::size_t i = 0; i < e.psi.grid.size(); ++i) REQUIRE(e.psi.value[i] > 0.0);
  CHECK(e.psi(31.0) == 0.0);
  std::vector<double> sq(e.psi.value.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = e.psi.value[i] * e.psi.value[i];
  const double norm2 = quadrature(e.psi.grid, sq, true, Rule::simpson);
  CHECK(norm2 == doctest::Approx(2.4051545).epsilon(1e-6));
}

TEST_CASE("zeta is stable under a longer shooting radius") {
  EigenOptions o;
  o.shoot_radius = 30.0;
  const auto e30 = solve_eigenpair({0.3, 0.9}, nullptr, o);
  CHECK(std::abs(e30.zeta - solve_eigenpair().zeta) <= 1e-7);
}

TEST_CASE("unit L2 normalization rescales psi only") {
  EigenOptions o;
  o.normalization = Normalization::unit_l2;
  const auto e = solve_eigenpair({0.3, 0.9}, nullptr, o);
  const auto e1 = solve_eigenpair();
  CHECK(e.zeta == e1.zeta);
  std::vector<double> sq(e.psi.value.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = e.psi.value[i] * e.psi.value[i];
  CHECK(quadrature(e.psi.grid, sq, true, Rule::simpson) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.psi.value.front() == doctest::Approx(e.scale).epsilon(1e-14));
}

TEST_CASE("a bracket without the eigenvalue is rejected") {
  try {
    solve_eigenpair({0.7, 0.9});
    FAIL("bracket accepted");
  } catch (const NumericalError& e) {
    CHECK(e.code() == ErrorCode::no_sign_change);
  }
}
