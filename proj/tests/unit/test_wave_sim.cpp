#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "critwave/error.hpp"
#include "critwave/groundstate.hpp"
#include "critwave/wave_sim.hpp"
#include "doctest.h"

using namespace critwave;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const NumericalError& e) {
    return e.code();
  }
  FAIL("no NumericalError raised");
  return ErrorCode::domain_error;
}

const ModulationContext& ctx() {
  static const ModulationContext c(0.02);
  return c;
}

// u = (1/lambda) P_b(r/lambda), u_t = (b/lambda^2) Lambda P_b(r/lambda).
WaveState modulated_state(double lambda, double b) {
  WaveState st{wave_grid({8000, 0.01, 400.0}), {}, {}, 0.0, 0.5};
  for (double r : st.grid.nodes()) {
    const double y = r / lambda;
    st.u.push_back(ctx().P(b, y) / lambda);
    st.ut.push_back(b / (lambda * lambda) * (ctx().P(b, y) + y * ctx().dP(b, y)));
  }
  return st;
}

ModulationTrace synthetic_trace(double rate, double amp) {
  ModulationTrace tr;
  for (int i = 0; i <= 100; ++i) {
    const double s = 0.1 * i;
    tr.s.push_back(s);
    tr.b.push_back(0.02 / (1.0 + 0.01 * s));
    tr.lambda.push_back(std::exp(-0.02 * s));
    tr.kappa_plus.push_back(amp * std::exp(rate * s));
    tr.kappa_minus.push_back(0.0);
    tr.b_s.push_back(-0.0002 / ((1.0 + 0.01 * s) * (1.0 + 0.01 * s)));
    tr.calE.push_back(0.0);
    tr.t.push_back(s);
  }
  return tr;
}

}  // namespace

TEST_CASE("wave grid") {
  const auto g = wave_grid({1000, 0.05, 50.0});
  CHECK(g.size() == 1000);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(g.r_max() == doctest::Approx(50.0).epsilon(1e-14));
  CHECK(code_of([] { wave_grid({8, 0.05, 50.0}); }) == ErrorCode::domain_error);
  CHECK(code_of([] { wave_grid({100, 60.0, 50.0}); }) == ErrorCode::domain_error);
}

TEST_CASE("radial Laplacian") {
  const RadialLaplacian lap(wave_grid({400, 0.02, 20.0}));
  const auto& g = lap.grid();
  std::vector<double> u(g.size()), out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = g[i] * g[i];
  lap.apply(u, out);
  // Lap r^2 = 8 in four dimensions, exact at the origin cell.
  CHECK(out[0] == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(out[g.size() / 2] == doctest::Approx(8.0).epsilon(1e-3));
  CHECK(out.back() == 0.0);

  SUBCASE("property: symmetric in the volume-weighted product") {
    std::vector<double> f(g.size()), h(g.size()), lf(g.size()), lh(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      f[i] = std::exp(-g[i] * g[i] / 8.0) - std::exp(-50.0);
      h[i] = std::cos(g[i]) / (1.0 + g[i] * g[i]);
    }
    f.back() = h.back() = 0.0;
    lap.apply(f, lf);
    lap.apply(h, lh);
    std::vector<double> a(g.size()), b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      a[i] = f[i] * lh[i];
      b[i] = h[i] * lf[i];
    }
    CHECK(lap.mass(a) == doctest::Approx(lap.mass(b)).epsilon(1e-12));
    for (std::size_t i = 0; i < g.size(); ++i) a[i] = f[i] * lf[i];
    CHECK(-lap.mass(a) == doctest::Approx(2.0 * lap.gradient_energy(f)).epsilon(1e-12));
  }
}

TEST_CASE("wave solver basics") {
  const auto g = wave_grid({500, 0.02, 30.0});
  WaveSolver zero(WaveState{g, std::vector<double>(g.size()), std::vector<double>(g.size()), 0.0, 0.5});
  zero.advance(zero.default_dt(), 50);
  CHECK(std::all_of(zero.state().u.begin(), zero.state().u.end(), [](double x) { return x == 0.0; }));
  CHECK(zero.state().t == doctest::Approx(50 * zero.default_dt()));
  CHECK(code_of([&] { zero.step(2.0 * zero.default_dt()); }) == ErrorCode::cfl_violation);
}

TEST_CASE("property: discrete scaling symmetry") {
  // u -> (1/lambda) u(t/lambda, r/lambda) maps the scheme to itself on the dilated grid.
  const double lambda = 2.0;
  const auto g1 = wave_grid({600, 0.02, 30.0});
  const auto g2 = wave_grid({600, 0.02 * lambda, 30.0 * lambda});
  WaveState s1{g1, {}, {}, 0.0, 0.5}, s2{g2, {}, {}, 0.0, 0.5};
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const double r = g1[i];
    s1.u.push_back(0.5 * std::exp(-r * r / 4.0));
    s1.ut.push_back(0.1 * r * std::exp(-r * r / 4.0));
    s2.u.push_back(s1.u.back() / lambda);
    s2.ut.push_back(s1.ut.back() / (lambda * lambda));
  }
  WaveSolver a(s1), b(s2);
  const double dt = a.default_dt();
  a.advance(dt, 200);
  b.advance(dt * lambda, 200);
  double worst = 0.0;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    worst = std::max(worst, std::abs(lambda * b.state().u[i] - a.state().u[i]));
  }
  CHECK(worst <= 1e-12);
  CHECK(b.state().t == doctest::Approx(lambda * a.state().t).epsilon(1e-14));
}

TEST_CASE("solver hygiene") {
  const auto h = solver_hygiene();
  REQUIRE(h.drift.size() == 3);
  for (double r : h.drift_ratio) CHECK(r == doctest::Approx(4.0).epsilon(0.05));
  CHECK(h.drift_bounded);
  CHECK(h.drift[0] == doctest::Approx(1.89e-4).epsilon(0.01));
  CHECK(h.energy_drift_rk4 <= 1e-6);
  CHECK(h.energy_drift_leapfrog <= 1e-4);
  REQUIRE(h.leak.size() == 3);
  CHECK(h.leak[0] == doctest::Approx(4.66e-6).epsilon(0.01));
  CHECK(h.leak[1] < h.leak[0]);
  CHECK(h.leak[2] <= 1e-12);
}

TEST_CASE("modulation context") {
  const auto& c = ctx();
  CHECK(c.zeta() == doctest::Approx(0.5860808922484).epsilon(1e-10));
  CHECK(c.psi_norm2() == doctest::Approx(2.4051545).epsilon(1e-6));
  CHECK(c.c0() == doctest::Approx(-51.59680735).epsilon(1e-8));
  CHECK(c.P_psi(0.02) == doctest::Approx(6.6599351).epsilon(1e-6));
  CHECK(c.dbP_psi(0.02) == doctest::Approx(-0.29816481).epsilon(1e-5));
  CHECK(c.in_table(0.02));
  CHECK(c.in_table(0.011));
  CHECK_FALSE(c.in_table(0.031));
  CHECK(c.weight(1.0) == doctest::Approx(phi_DLQ(1.0)).epsilon(1e-14));
  CHECK(c.weight(50.0) == 0.0);
  // d_b P agrees with a difference quotient of the table.
  const double h = 1e-5;
  CHECK(c.dbP(0.02, 10.0) == doctest::Approx((c.P(0.02 + h, 10.0) - c.P(0.02 - h, 10.0)) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("initial data") {
  const auto& c = ctx();
  const auto in = init_data({0.02, 0.0, {}, {}}, c, {8000, 0.01, 0.0 + 400.0}, 0.0);
  CHECK(in.state.u[0] == doctest::Approx(0.992093134002).epsilon(1e-10));
  CHECK(in.kappa_plus_intended == 0.0);
  const auto kick = init_data({0.02, 1e-4, {}, {}}, c, {8000, 0.01, 400.0}, 0.0);
  CHECK(kick.kappa_plus_intended ==
        doctest::Approx(0.5e-4 * c.psi_norm2() * (1.0 + 0.02 / std::sqrt(c.zeta()))).epsilon(1e-14));
  CHECK(kick.state.u[0] - in.state.u[0] == doctest::Approx(1e-4).epsilon(1e-10));
  CHECK(code_of([&] { init_data({0.02, 0.0, {}, {}}, c, {8000, 0.01, 50.0}, 0.0); }) == ErrorCode::grid_too_short);
  CHECK(code_of([&] { init_data({0.5, 0.0, {}, {}}, c, {8000, 0.01, 400.0}, 0.0); }) == ErrorCode::domain_error);
  CHECK(code_of([&] { init_data({0.03, 0.0, {}, {}}, c, {8000, 0.01, 400.0}, 0.0); }) == ErrorCode::domain_error);
}

TEST_CASE("extraction round trip") {
  const double lambda = 0.9, b = 0.021;
  const auto ex = extract_modulation(modulated_state(lambda, b), ctx(), 1.0);
  CHECK(ex.lambda == doctest::Approx(lambda).epsilon(1e-12));
  CHECK(ex.b == doctest::Approx(b).epsilon(1e-8));
  CHECK(std::abs(ex.constraint) <= 1e-9);
  CHECK(std::abs(ex.eps_psi) <= 1e-6);
}

TEST_CASE("property: extraction is covariant under scaling") {
  for (double lambda : {0.8, 1.1}) {
    const auto ex = extract_modulation(modulated_state(lambda, 0.02), ctx(), 1.0);
    CHECK(ex.lambda == doctest::Approx(lambda).epsilon(1e-11));
    CHECK(ex.b == doctest::Approx(0.02).epsilon(1e-8));
  }
}

TEST_CASE("mode projection") {
  const auto& psi = ctx().psi().psi;
  const double k = std::sqrt(ctx().zeta());
  std::vector<double> dv(psi.value.size());
  std::transform(psi.value.begin(), psi.value.end(), dv.begin(), [&](double v) { return k * v; });
  const RadialFunction growing(psi.grid, dv);
  const auto m = project_modes(psi, growing, ctx().psi());
  CHECK(m.kappa_plus == doctest::Approx(ctx().psi_norm2()).epsilon(1e-6));
  CHECK(std::abs(m.kappa_minus) <= 1e-6);
  const auto s = project_modes(2.0, 0.0, ctx().zeta());
  CHECK(s.kappa_plus == 1.0);
  CHECK(s.kappa_minus == 1.0);
  const auto c = project_modes(0.0, 0.0, ctx().zeta(), 0.5, 0.3);
  CHECK(c.kappa_plus == doctest::Approx(0.075 / k).epsilon(1e-14));
  CHECK(c.kappa_minus == doctest::Approx(-0.075 / k).epsilon(1e-14));
}

TEST_CASE("unperturbed trajectory") {
  SimulationOptions opt;
  opt.diagnostics = true;
  const auto tr = run_trajectory({0.02, 0.0, {}, {}}, ctx(), opt);
  CHECK(tr.exit_sign == 1);
  CHECK(tr.s_exit == doctest::Approx(1.94).epsilon(0.05));
  REQUIRE(tr.s.size() > 3);
  // At s = 0 eps is pure rounding, so the normalized constraint is meaningless there.
  CHECK(*std::max_element(tr.constraint.begin() + 1, tr.constraint.end()) <= 1e-6);
  for (std::size_t i = 1; i + 1 < tr.s.size(); ++i) {
    CHECK(tr.lambda_t[i] == doctest::Approx(tr.b[i]).epsilon(0.05));
  }
}

TEST_CASE("growth and envelope fits") {
  const double k = std::sqrt(0.5860808922484);
  const auto crit = synthetic_trace(k, 0.0);
  const auto pert = synthetic_trace(k, 1e-8);
  const auto g = fit_growth(pert, crit, 0.5860808922484);
  CHECK(g.rate == doctest::Approx(k).epsilon(1e-8));
  CHECK(g.relative_error <= 1e-8);
  CHECK(g.s_from >= 4.0);
  const auto e = fit_envelopes(pert);
  CHECK(e.b_max_ratio == doctest::Approx(1.0));
  CHECK(e.b_decreasing);
  CHECK(e.lambda_decreasing);
  CHECK(std::isfinite(e.K_kappa_plus));
  CHECK(e.K_bs > 0.0);
}
