#include "critwave/coercivity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <optional>

#include "critwave/bessel.hpp"
#include "critwave/differentiate.hpp"
#include "critwave/error.hpp"
#include "critwave/groundstate.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {

namespace {

const std::vector<double> kWTaylor{6.0, 0.0, -3.75, 0.0, 1.125};
const std::vector<double> kWHatTaylor{0.0, 0.0, -1.5, 0.0, 0.5625};

double potential(IndexPotential p, double r) {
  switch (p) {
    case IndexPotential::W: return potential_W(r);
    case IndexPotential::W_hat: return potential_W_hat(r);
    case IndexPotential::zero: return 0.0;
  }
  return 0.0;
}

const std::vector<double>& taylor(IndexPotential p) {
  static const std::vector<double> none;
  switch (p) {
    case IndexPotential::W: return kWTaylor;
    case IndexPotential::W_hat: return kWHatTaylor;
    case IndexPotential::zero: return none;
  }
  return none;
}

// Sign changes of tabulated values, each refined on the interpolant.
std::vector<double> locate_zeros(const std::function<double(double)>& f, std::span<const double> xs,
                                 std::span<const double> vs) {
  std::vector<double> zeros;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (vs[i] == 0.0 && i > 0) {
      zeros.push_back(xs[i]);
      continue;
    }
    if (vs[i] * vs[i + 1] < 0.0) {
      zeros.push_back(find_root(f, {xs[i], xs[i + 1]}, 1e-13 * std::max(1.0, xs[i + 1]), RootMethod::secant).root);
    }
  }
  return zeros;
}

// Trapezoid of g(r) r^3 over the grid nodes below R, closed with a partial
// panel ending exactly at R.
double truncated_product(const RadialGrid& grid, const std::function<double(double)>& g, double R) {
  double sum = 0.0;
  double prev_r = grid[0];
  double prev = g(prev_r) * prev_r * prev_r * prev_r;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double r = std::min(grid[i], R);
    const double cur = g(r) * r * r * r;
    sum += 0.5 * (r - prev_r) * (prev + cur);
    prev_r = r;
    prev = cur;
    if (grid[i] >= R) break;
  }
  return sum;
}

RadialGrid inversion_grid(const InversionOptions& opt) {
  const auto n_in = static_cast<std::size_t>(std::llround(opt.inner_radius / opt.inner_step));
  std::vector<double> nodes;
  nodes.reserve(n_in + opt.outer_nodes + 1);
  for (std::size_t i = 0; i <= n_in; ++i) nodes.push_back(opt.inner_radius * static_cast<double>(i) / n_in);
  const auto outer = RadialGrid::geometric_first_step(opt.inner_radius, opt.match_radius, opt.outer_nodes + 1,
                                                      opt.inner_step);
  for (std::size_t i = 1; i < outer.size(); ++i) nodes.push_back(outer[i]);
  return RadialGrid::from_nodes(std::move(nodes));
}

double tail_offset(InverseDecay decay) { return decay == InverseDecay::log_inverse_square ? -192.0 : 0.0; }

}  // namespace

RadialFunction apply_B(const RadialFunction& u) {
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
    const double r = g[i];
    out[i] = r == 0.0 ? -4.0 * d2[i] + potential_W(0.0) * u.value[i]
                      : -d2[i] - 3.0 / r * d1[i] + potential_W(r) * u.value[i];
  }
  return RadialFunction(g, std::move(out));
}

RadialFunction zero_energy_solution(const RadialGrid& grid, IndexPotential p, const OdeOptions& opt) {
  const auto launch = regular_launch(taylor(p), {}, 1.0, 4);
  return integrate_radial_ode([p](double r, double u, double du) { return potential(p, r) * u - 3.0 / r * du; },
                              launch, grid, opt);
}

IndexReport count_index_direct(const RadialGrid& grid, IndexPotential p, const OdeOptions& opt) {
  const auto U = zero_energy_solution(grid, p, opt);
  IndexReport rep;
  rep.zeros = locate_zeros([&U](double r) { return U(r); }, grid.nodes(), U.value);
  rep.zero_count = static_cast<int>(rep.zeros.size());
  rep.tail_value = U.value.back();
  rep.tail_flatness = std::abs(U.value.back() - U(0.5 * grid.r_max()));
  return rep;
}

double bessel_reduced_solution(double tau, double C1, double C2) {
  const auto b = bessel_J1_Y1(4.0 * std::sqrt(6.0) * tau);
  return C1 * b.j1 + C2 * b.y1;
}

IndexReport count_index_bessel(double tau_min) {
  const double a = 4.0 * std::sqrt(6.0);
  const auto at1 = bessel_values(a);
  // C1 J1(a) + C2 Y1(a) = 0, a (C1 J1'(a) + C2 Y1'(a)) = -8.
  const double det = at1.j1 * at1.dy1 - at1.y1 * at1.dj1;
  if (!(std::abs(det) > 1e-12)) raise(ErrorCode::singular_bessel_system, "Bessel Wronskian vanished");
  IndexReport rep;
  rep.C1 = (8.0 / a) * at1.y1 / det;
  rep.C2 = -(8.0 / a) * at1.j1 / det;
  const auto u = [&](double t) { return bessel_reduced_solution(t, rep.C1, rep.C2); };
  const auto bv = bessel_values(a);
  rep.boundary_value = rep.C1 * bv.j1 + rep.C2 * bv.y1;
  rep.boundary_slope = a * (rep.C1 * bv.dj1 + rep.C2 * bv.dy1);

  const std::size_t n = 20000;
  std::vector<double> ts(n), vs(n);
  const double t_hi = 1.0 - 1e-9;
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = tau_min + (t_hi - tau_min) * static_cast<double>(i) / (n - 1);
    vs[i] = u(ts[i]);
  }
  rep.zeros = locate_zeros(u, ts, vs);
  rep.bessel_zero_count = static_cast<int>(rep.zeros.size());
  rep.zero_count = rep.bessel_zero_count;
  for (double t : rep.zeros) rep.zeros_in_r.push_back(std::sqrt(8.0 * (1.0 / (t * t) - 1.0)));
  rep.K = 1e-3 * u(1e-3);
  rep.K_half = 5e-4 * u(5e-4);
  rep.K_exact = -2.0 * rep.C2 / (std::numbers::pi * a);
  rep.K_nonzero = std::abs(rep.K) > 1e-8 && std::abs(rep.K / rep.K_half - 1.0) < 0.01;
  return rep;
}

Inversion invert_B(const std::function<double(double)>& f, InverseDecay decay, const InversionOptions& opt) {
  const double f0 = f(0.0);
  const double a = tail_offset(decay);
  const double R = opt.match_radius;
  const auto grid = inversion_grid(opt);
  auto system = [&f](double r, const std::array<double, 2>& s, std::array<double, 2>& d) {
    d[0] = s[1];
    d[1] = potential_W(r) * s[0] - f(r) - 3.0 / r * s[1];
  };
  auto tail_functional = [&](const std::array<double, 2>& s) { return s[0] + 0.5 * R * s[1] - a / (2.0 * R * R); };
  auto shoot = [&](double c, std::vector<double>* v, std::vector<double>* dv) {
    const auto launch = regular_launch(kWTaylor, {-f0}, c, 2);
    DormandPrince<2> dp(system, opt.ode);
    double r = launch.y0;
    std::array<double, 2> s{launch.value(r), launch.derivative(r)};
    if (v) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= launch.y0) {
          (*v)[i] = launch.value(grid[i]);
          (*dv)[i] = grid[i] == 0.0 ? 0.0 : launch.derivative(grid[i]);
          continue;
        }
        dp.advance(r, s, grid[i]);
        (*v)[i] = s[0];
        (*dv)[i] = s[1];
      }
    } else {
      dp.advance(r, s, R);
    }
    return tail_functional(s);
  };

  // The problem is affine in U(0); a vanishing response means the
  // homogeneous solution decays and the tail cannot select the inverse.
  const double t0 = shoot(0.0, nullptr, nullptr);
  const double t1 = shoot(1.0, nullptr, nullptr);
  if (!(std::abs(t1 - t0) > 1e-10)) raise(ErrorCode::tail_mismatch, "homogeneous solution does not reach the tail");
  const auto root = find_root([&](double c) { return shoot(c, nullptr, nullptr); }, opt.origin_bracket, 1e-14,
                              RootMethod::secant);

  std::vector<double> v(grid.size()), dv(grid.size());
  const double final_tail = shoot(root.root, &v, &dv);
  const double uR = v.back(), duR = dv.back();
  const bool square = decay == InverseDecay::inverse_square;
  const double coef = square ? R * R * uR : R * R * (R * duR + 2.0 * uR);
  Inversion inv{RadialFunction(grid, std::move(v), std::move(dv), TailLaw{-2.0, square ? 0.0 : 1.0, coef}),
                root.root, final_tail, coef};
  inv.decay = decay;

  // Spread of r^2 U (or r^2 U / log r) over the outer part of the range; the
  // corrected diagnostic removes the leading log term, leaving the constant of
  // U ~ (a log r + C) / r^2.
  const double lo = square ? R / 3.0 : R / 5.0;
  auto spread = [&](auto&& diag) {
    double mn = INFINITY, mx = -INFINITY, mean = 0.0;
    int cnt = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] < lo) continue;
      const double d = diag(grid[i], inv.U.value[i]);
      mn = std::min(mn, d);
      mx = std::max(mx, d);
      mean += d;
      ++cnt;
    }
    return (mx - mn) / std::abs(mean / cnt);
  };
  if (square) {
    inv.flatness = spread([](double r, double u) { return r * r * u; });
    inv.corrected_flatness = inv.flatness;
  } else {
    inv.flatness = spread([](double r, double u) { return r * r * u / std::log(r); });
    inv.corrected_flatness = spread([coef](double r, double u) { return r * r * u - coef * std::log(r); });
  }

  const auto BU = apply_B(inv.U);
  std::vector<double> res2, f2;
  std::vector<double> inner_nodes;
  for (std::size_t i = 0; i < grid.size() && grid[i] <= opt.inner_radius; ++i) {
    const double fr = f(grid[i]);
    const double d = BU.value[i] - fr;
    inner_nodes.push_back(grid[i]);
    res2.push_back(d * d);
    f2.push_back(fr * fr);
  }
  const auto inner = RadialGrid::from_nodes(inner_nodes);
  inv.residual = std::sqrt(quadrature(inner, res2) / quadrature(inner, f2));
  return inv;
}

Inversion invert_B(const RadialFunction& f, InverseDecay decay, const InversionOptions& opt) {
  return invert_B([&f](double r) { return f(r); }, decay, opt);
}

double phi_phi_partial(const Inversion& inv_phi, double M) {
  return truncated_product(inv_phi.U.grid, [&](double r) { return inv_phi.U(r) * phi_DLQ(r); }, M);
}

GramMatrix gram_matrix(const EigenPair& psi, const Inversion& inv_psi, const Inversion& inv_phi,
                       const GramOptions& opt) {
  GramMatrix g;
  g.normalization = psi.normalization;
  g.psi_scale = psi.scale;
  const auto& Upsi = inv_psi.U;
  const auto& Uphi = inv_phi.U;
  const double Rp = opt.psi_radius;
  g.psi_psi = truncated_product(Upsi.grid, [&](double r) { return Upsi(r) * psi.psi(r); }, Rp);
  g.phi_psi = truncated_product(Uphi.grid, [&](double r) { return Uphi(r) * psi.psi(r); }, Rp);
  // Beyond the match radius U ~ c/r^2 against Phi ~ -384/r^4.
  const double Rm = Upsi.grid.r_max();
  g.psi_phi = truncated_product(Upsi.grid, [&](double r) { return Upsi(r) * phi_DLQ(r); }, Rm) -
              192.0 * inv_psi.tail_coefficient / (Rm * Rm);
  g.symmetry_defect = std::abs(g.phi_psi - g.psi_phi) / std::abs(g.phi_psi);

  const double M = opt.tail_M;
  if (2.0 * M > Uphi.grid.r_max() * (1.0 + 1e-12)) raise(ErrorCode::grid_too_short, "Phi inversion ends before 2M");
  const double Mq = 0.25 * M, Mh = 0.5 * M, M2 = 2.0 * M;
  const double Iq = phi_phi_partial(inv_phi, Mq), Ih = phi_phi_partial(inv_phi, Mh);
  const double I1 = phi_phi_partial(inv_phi, M), I2 = phi_phi_partial(inv_phi, M2);
  auto e = [](double m) { return std::log(m) / (m * m); };
  g.phi_phi_raw = I2;
  g.K_tail = (I2 - I1) / (e(M2) - e(M));
  g.phi_phi = I2 - g.K_tail * e(M2);

  // I(m) = I_inf + (K log m + L)/m^2 through three radii.
  auto three_point = [&](double m0, double i0, double m1, double i1, double m2, double i2) {
    auto p = [](double m) { return 1.0 / (m * m); };
    const double d1 = i1 - i0, d2 = i2 - i1;
    const double a11 = e(m1) - e(m0), a12 = p(m1) - p(m0);
    const double a21 = e(m2) - e(m1), a22 = p(m2) - p(m1);
    const double det = a11 * a22 - a12 * a21;
    const double K = (d1 * a22 - a12 * d2) / det;
    const double L = (a11 * d2 - a21 * d1) / det;
    return std::array<double, 2>{K, i2 - K * e(m2) - L * p(m2)};
  };
  const auto hi = three_point(Mh, Ih, M, I1, M2, I2);
  const auto lo = three_point(Mq, Iq, Mh, Ih, M, I1);
  g.K_richardson = hi[0];
  g.K_richardson_low = lo[0];
  g.phi_phi_richardson = hi[1];
  g.K_exact = 192.0 * inv_phi.tail_coefficient;
  if (std::abs(hi[0] - lo[0]) > 0.2 * std::abs(hi[0])) {
    raise(ErrorCode::tail_fit_unstable, "three-point tail fits disagree: " + std::to_string(hi[0]) + " vs " +
                                            std::to_string(lo[0]));
  }

  g.det = g.psi_psi * g.phi_phi - g.phi_psi * g.phi_psi;
  g.invariant_ratio = g.phi_psi * g.phi_psi / (g.psi_psi * g.phi_phi);
  return g;
}

CoercivityReport run_coercivity(unsigned max_workers, Normalization normalization) {
  std::optional<EigenPair> psi;
  std::optional<Inversion> inv_psi, inv_phi;
  IndexReport index_W, index_W_hat, index_bessel;
  InversionOptions phi_opt;
  phi_opt.match_radius = 1000.0;
  phi_opt.outer_nodes = 6000;
  const auto index_grid = RadialGrid::uniform(0.0, 250.0, 25001);

  auto psi_task = [&] {
    EigenOptions eo;
    eo.normalization = normalization;
    psi = solve_eigenpair({0.3, 0.9}, nullptr, eo);
    inv_psi = invert_B(psi->psi, InverseDecay::inverse_square);
  };
  auto index_task = [&] {
    index_W = count_index_direct(index_grid, IndexPotential::W);
    index_W_hat = count_index_direct(index_grid, IndexPotential::W_hat);
    index_bessel = count_index_bessel();
  };
  auto phi_task = [&] { inv_phi = invert_B(phi_DLQ, InverseDecay::log_inverse_square, phi_opt); };

  const unsigned extra = std::min(max_workers > 0 ? max_workers - 1 : 0u, 2u);
  std::vector<std::future<void>> pending;
  std::vector<std::function<void()>> tasks{psi_task, phi_task, index_task};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (i < extra) {
      pending.push_back(std::async(std::launch::async, tasks[i]));
    }
  }
  for (std::size_t i = extra; i < tasks.size(); ++i) tasks[i]();
  for (auto& f : pending) f.get();
  auto gram = gram_matrix(*psi, *inv_psi, *inv_phi);
  return {std::move(*psi), index_W, index_W_hat, index_bessel, std::move(*inv_psi), std::move(*inv_phi), gram};
}

}  // namespace critwave
