#include "critwave/spectral.hpp"

#include <cmath>

#include "critwave/differentiate.hpp"
#include "critwave/error.hpp"
#include "critwave/groundstate.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {

namespace {

SeriesLaunch eigen_launch(double zeta) {
  // psi'' + (3/y) psi' = (zeta - V) psi, V = 3 - (3/4) y^2 + (9/64) y^4 - ...
  return regular_launch({zeta - 3.0, 0.0, 0.75, 0.0, -9.0 / 64.0}, {}, 1.0, 4);
}

RadialRhs eigen_rhs(double zeta) {
  return [zeta](double y, double u, double du) { return -3.0 / y * du + (zeta - potential_V(y)) * u; };
}

}  // namespace

RadialFunction apply_H(const RadialFunction& u) {
  const auto& g = u.grid;
  const std::size_t n = g.size();
  std::vector<double> d1, d2;
  if (u.has_deriv()) {
    d1 = u.deriv;
    d2 = fd_derivatives(g, u.deriv, false).d1;
    if (g[0] == 0.0) d2[0] = fd_derivatives(g, u.value).d2[0];
  } else {
    auto d = fd_derivatives(g, u.value);
    d1 = std::move(d.d1);
    d2 = std::move(d.d2);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = g[i];
    out[i] = y == 0.0 ? -4.0 * d2[i] - potential_V(0.0) * u.value[i]
                      : -d2[i] - 3.0 / y * d1[i] - potential_V(y) * u.value[i];
  }
  return RadialFunction(g, std::move(out));
}

double eigen_mismatch(double zeta, double shoot_radius, const OdeOptions& opt) {
  const auto launch = eigen_launch(zeta);
  const auto rhs = eigen_rhs(zeta);
  DormandPrince<2> dp(
      [&rhs](double y, const std::array<double, 2>& s, std::array<double, 2>& d) {
        d[0] = s[1];
        d[1] = rhs(y, s[0], s[1]);
      },
      opt);
  double y = launch.y0;
  std::array<double, 2> s{launch.value(y), launch.derivative(y)};
  dp.advance(y, s, shoot_radius);
  return s[1] + (std::sqrt(zeta) + 1.5 / shoot_radius) * s[0];
}

RadialGrid eigen_grid(double trust_radius, std::size_t nodes) { return RadialGrid::uniform(0.0, trust_radius, nodes); }

EigenPair solve_eigenpair(Bracket bracket, const RadialGrid* grid_in, const EigenOptions& opt) {
  const auto root = find_root([&](double z) { return eigen_mismatch(z, opt.shoot_radius, opt.ode); }, bracket,
                              opt.zeta_tol, RootMethod::bisection);
  const double zeta = root.root;
  const double kappa = std::sqrt(zeta);
  const RadialGrid grid = grid_in ? *grid_in : eigen_grid(opt.trust_radius);
  const std::size_t n = grid.size();
  const auto rhs = eigen_rhs(zeta);
  auto system = [&rhs](double y, const std::array<double, 2>& s, std::array<double, 2>& d) {
    d[0] = s[1];
    d[1] = rhs(y, s[0], s[1]);
  };

  std::vector<double> v(n, 0.0), dv(n, 0.0);
  // Outward leg up to the match radius.
  const auto launch = eigen_launch(zeta);
  DormandPrince<2> out(system, opt.ode);
  double y = launch.y0;
  std::array<double, 2> s{launch.value(y), launch.derivative(y)};
  std::size_t i = 0;
  for (; i < n && grid[i] <= opt.match_radius; ++i) {
    if (grid[i] <= launch.y0) {
      v[i] = launch.value(grid[i]);
      dv[i] = grid[i] == 0.0 ? 0.0 : launch.derivative(grid[i]);
      continue;
    }
    out.advance(y, s, grid[i]);
    v[i] = s[0];
    dv[i] = s[1];
  }
  out.advance(y, s, opt.match_radius);
  const std::array<double, 2> at_match = s;

  // Plain outward continuation: radius where the growing mode takes over,
  // i.e. psi r^{3/2} e^{kappa r} leaves its match-radius value by 10%.
  double instability = 0.0;
  {
    DormandPrince<2> cont(system, opt.ode);
    double yc = y;
    std::array<double, 2> sc = s;
    const double ref = sc[0] * std::pow(yc, 1.5) * std::exp(kappa * yc);
    for (double r = opt.match_radius + 0.1; r <= 80.0; r += 0.1) {
      cont.advance(yc, sc, r);
      const double env = sc[0] * std::pow(r, 1.5) * std::exp(kappa * r);
      if (std::abs(env / ref - 1.0) > 0.1) {
        instability = r;
        break;
      }
    }
  }

  // Inward leg from the trust radius with the decaying asymptotics
  // psi ~ e^{-kappa r} r^{-3/2} (1 + 3/(8 kappa r)).
  const double R = opt.trust_radius;
  const double corr = 1.0 + 3.0 / (8.0 * kappa * R);
  std::array<double, 2> t{std::exp(-kappa * R) * std::pow(R, -1.5) * corr, 0.0};
  t[1] = t[0] * (-kappa - 1.5 / R - 3.0 / (8.0 * kappa * R * R) / corr);
  DormandPrince<2> in(system, opt.ode);
  double yi = R;
  std::vector<std::pair<std::size_t, std::array<double, 2>>> inner;
  for (std::size_t k = n; k-- > i;) {
    if (grid[k] > R) continue;
    in.advance(yi, t, grid[k]);
    inner.push_back({k, t});
  }
  in.advance(yi, t, opt.match_radius);
  const double scale = at_match[0] / t[0];
  const double ld_mismatch = std::abs(at_match[1] / at_match[0] - t[1] / t[0]);
  for (const auto& [k, st] : inner) {
    v[k] = scale * st[0];
    dv[k] = scale * st[1];
  }

  double norm_factor = 1.0;
  if (opt.normalization == Normalization::unit_l2) {
    std::vector<double> sq(n);
    for (std::size_t k = 0; k < n; ++k) sq[k] = v[k] * v[k];
    norm_factor = 1.0 / std::sqrt(quadrature(grid, sq, true, Rule::simpson));
    for (std::size_t k = 0; k < n; ++k) {
      v[k] *= norm_factor;
      dv[k] *= norm_factor;
    }
  }
  EigenPair ep{zeta, RadialFunction(grid, std::move(v), std::move(dv)), opt.normalization};
  ep.scale = norm_factor;
  ep.log_derivative_mismatch = ld_mismatch;
  ep.instability_radius = instability;
  ep.bisection_steps = root.iterations;

  // Residual and overlap diagnostics on the trust region.
  const auto Hpsi = apply_H(ep.psi);
  std::vector<double> r2(n), p2(n), lq2(n), plq(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double yk = grid[k];
    const bool inside = yk <= R;
    const double res = inside ? Hpsi.value[k] + zeta * ep.psi.value[k] : 0.0;
    r2[k] = res * res;
    p2[k] = ep.psi.value[k] * ep.psi.value[k];
    const double l = inside ? lambda_Q(yk) : 0.0;
    lq2[k] = l * l;
    plq[k] = ep.psi.value[k] * l;
  }
  const double pn = std::sqrt(quadrature(grid, p2, true, Rule::simpson));
  ep.eigen_residual = std::sqrt(quadrature(grid, r2, true, Rule::simpson)) / pn;
  ep.lq_overlap = std::abs(quadrature(grid, plq, true, Rule::simpson)) /
                  (pn * std::sqrt(quadrature(grid, lq2, true, Rule::simpson)));

  // Decay diagnostics on [10, 15].
  double prev = 0.0, prev_bare = 0.0, prev_r = 0.0;
  bool first = true;
  for (double r = 10.0; r <= 15.0 + 1e-12; r += 0.25) {
    const double p = ep.psi(r);
    const double bare = p * std::exp(kappa * r);
    const double full = bare * std::pow(r, 1.5);
    if (!first) {
      ep.decay_slope = std::max(ep.decay_slope, std::abs(std::log(full / prev)) / (r - prev_r));
      ep.bare_decay_slope = std::max(ep.bare_decay_slope, std::abs(std::log(bare / prev_bare)) / (r - prev_r));
    }
    first = false;
    prev = full;
    prev_bare = bare;
    prev_r = r;
  }
  if (ep.decay_slope > 1e-2) {
    raise(ErrorCode::decay_not_entered, "psi r^{3/2} e^{sqrt(zeta) r} not flat on [10,15]: slope " +
                                            std::to_string(ep.decay_slope));
  }
  return ep;
}

}  // namespace critwave
