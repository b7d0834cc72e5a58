#include "critwave/profile.hpp"

#include <algorithm>
#include <cmath>

#include "critwave/error.hpp"
#include "critwave/groundstate.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {

namespace {

const GaussLegendre& gl20() {
  static const GaussLegendre rule(20);
  return rule;
}

void check_b(double b) {
  if (!(b > 0.0 && b <= 0.2)) raise(ErrorCode::domain_error, "b must lie in (0, 0.2], got " + std::to_string(b));
}

// Integral of (D Lambda Q) Lambda Q y^3 beyond R, from the exact identity
// (D Lambda Q, Lambda Q)_{[0,R]} = R^4 (Lambda Q(R))^2 / 2, written without cancellation.
double phi_lq_beyond(double R) {
  const double t = R * R / 8.0;
  const double p = 1.0 + t;
  const double w = t * (t - 1.0) / (p * p);
  return 32.0 * (1.0 + 3.0 * t) / (p * p) * (1.0 + w);
}

}  // namespace

Scales::Scales(double b_) : b(b_), B0(2.0 / b_), B1(-std::log(b_) / b_) {}

double Scales::log_b() const { return -std::log(b); }

CbResult compute_cb(double b) {
  check_b(b);
  static const double numerator = pohozaev_constant(1e4, 4000, Rule::simpson).value;
  const double half = 0.5 / b;  // B0/4
  auto f = [b](double y) {
    const double l = lambda_Q(y);
    return smoothstep_chi(2.0 * b * y).f * l * l * y * y * y;
  };
  const auto inner = geometric_breaks(0.0, half, 0.25, 1.12);
  double D = integrate_panels(f, inner, gl20());
  std::vector<double> outer(17);
  for (std::size_t i = 0; i < outer.size(); ++i) outer[i] = half + half * static_cast<double>(i) / 16.0;
  D += integrate_panels(f, outer, gl20());
  CbResult r;
  r.numerator = numerator;
  r.denominator = D;
  r.cb = numerator / D;
  r.offset = D - 64.0 * std::log(half);
  r.normalized = r.cb * 2.0 * (-std::log(b));
  return r;
}

double cb_denominator_db(double b) {
  const double half = 0.5 / b;
  auto f = [b](double y) {
    const double l = lambda_Q(y);
    return 2.0 * y * smoothstep_chi(2.0 * b * y).d1 * l * l * y * y * y;
  };
  std::vector<double> e(17);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = half + half * static_cast<double>(i) / 16.0;
  return integrate_panels(f, e, gl20());
}

double chi_m_phi_lambda_q(double M) {
  const Cutoff chi{M};
  auto f = [&chi](double y) { return chi(y) * phi_DLQ(y) * lambda_Q(y) * y * y * y; };
  std::vector<double> e(81);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = 2.0 * M * static_cast<double>(i) / 80.0;
  return integrate_panels(f, e, gl20());
}

GreenSolution solve_H_green(const std::function<double(double)>& F, const RadialGrid& grid, double far_tail,
                            double M, double switch_radius, const OdeOptions& opt) {
  const std::size_t n = grid.size();
  const SeriesLaunch gl = gamma_launch();
  const double y0 = gl.y0;
  const double F0 = F(0.0);
  const Cutoff chi_m{M};

  GreenSolution out;
  out.w.assign(n, 0.0);
  out.dw.assign(n, 0.0);
  out.d2w.assign(n, 0.0);

  // Forward sweep: Gamma, Gamma', I1 = int F LQ s^3, I2 = int F Gamma s^3,
  // K = int w chi_M Phi s^3 with w in the direct form.
  using S5 = std::array<double, 5>;
  DormandPrince<5> fwd(
      [&](double y, const S5& s, S5& d) {
        const auto g = eval_ground_family(y);
        const double f = F(y);
        const double y3 = y * y * y;
        d[0] = s[1];
        d[1] = -3.0 / y * s[1] - g.V.f * s[0];
        d[2] = f * g.LQ.f * y3;
        d[3] = f * s[0] * y3;
        const double cm = chi_m(y);
        d[4] = cm == 0.0 ? 0.0 : (s[0] * s[2] - g.LQ.f * s[3]) * cm * g.Phi.f * y3;
      },
      opt);
  const double y02 = y0 * y0, y04 = y02 * y02;
  S5 s{gl.value(y0), gl.derivative(y0), F0 * y04 / 4.0,
       F0 * (y02 / 4.0 - 0.75 * (y04 * std::log(y0) / 4.0 - y04 / 16.0)), -F0 * y04 * y02 / 24.0};
  double y = y0;

  std::vector<double> gam(n, 0.0), dgam(n, 0.0), I2(n, 0.0);
  std::size_t first_tail = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = grid[i];
    if (yi <= y0) {
      out.w[i] = -F0 * yi * yi / 8.0;
      out.dw[i] = -F0 * yi / 4.0;
      continue;
    }
    fwd.advance(y, s, yi);
    const auto g = eval_ground_family(yi);
    gam[i] = s[0];
    dgam[i] = s[1];
    I2[i] = s[3];
    if (yi < switch_radius) {
      out.w[i] = s[0] * s[2] - g.LQ.f * s[3];
      out.dw[i] = s[1] * s[2] - g.LQ.d1 * s[3];
    } else {
      if (first_tail == n) {
        first_tail = i;
        out.w[i] = s[0] * s[2] - g.LQ.f * s[3];  // kept to measure the switch jump
      }
    }
  }
  out.projection_LQ = s[2] + far_tail;
  out.chi_m_phi_moment = s[4];

  // Inward sweep for J1(y) = int_y^inf F LQ s^3, independent of Gamma.
  if (first_tail < n) {
    using S1 = std::array<double, 1>;
    DormandPrince<1> bwd(
        [&](double yy, const S1&, S1& d) {
          d[0] = -F(yy) * lambda_Q(yy) * yy * yy * yy;
        },
        opt);
    double yb = grid.r_max();
    S1 J{far_tail};
    for (std::size_t i = n; i-- > first_tail;) {
      bwd.advance(yb, J, grid[i]);
      const auto g = eval_ground_family(grid[i]);
      const double tail_w = -(gam[i] * J[0] + g.LQ.f * I2[i]);
      if (i == first_tail) out.switch_jump = std::abs(out.w[i] - tail_w);
      out.w[i] = tail_w;
      out.dw[i] = -(dgam[i] * J[0] + g.LQ.d1 * I2[i]);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double yi = grid[i];
    if (yi <= y0) {
      out.d2w[i] = -F0 / 4.0;
      continue;
    }
    out.d2w[i] = -3.0 / yi * out.dw[i] - potential_V(yi) * out.w[i] - F(yi);
  }
  return out;
}

RadialGrid profile_grid(double b, const ProfileOptions& opt) {
  const Scales sc(b);
  return RadialGrid::geometric_first_step(0.0, opt.reach * sc.B1, opt.nodes, opt.first_step);
}

T1Result build_T1(double b, const ProfileOptions& opt) {
  check_b(b);
  const Scales sc(b);
  if (opt.reach < 4.0) raise(ErrorCode::grid_too_short, "profile grid must reach 4 B1");
  T1Result r{profile_grid(b, opt), {}, {}, {}, b, opt.M, 0.0, 0.0, 0.0, 0.0, 0.0};
  const auto cbr = compute_cb(b);
  r.cb = cbr.cb;
  const double cb = cbr.cb;
  auto F = [cb, b](double y) { return -phi_DLQ(y) + cb * smoothstep_chi(2.0 * b * y).f * lambda_Q(y); };
  const double R = r.grid.r_max();
  // Beyond 1/b the cutoff vanishes and F = -Phi.
  const auto green = solve_H_green(F, r.grid, -phi_lq_beyond(R), opt.M, opt.switch_radius, opt.ode);
  r.c = green.chi_m_phi_moment / chi_m_phi_lambda_q(opt.M);
  r.switch_jump = green.switch_jump;
  r.projection_LQ = green.projection_LQ;

  const std::size_t n = r.grid.size();
  r.T1.resize(n);
  r.dT1.resize(n);
  r.d2T1.resize(n);
  const Cutoff chi_m{opt.M};
  std::vector<double> proj(n), norm(n), wn(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = eval_ground_family(r.grid[i]);
    r.T1[i] = green.w[i] - r.c * g.LQ.f;
    r.dT1[i] = green.dw[i] - r.c * g.LQ.d1;
    r.d2T1[i] = green.d2w[i] - r.c * g.LQ.d2;
    const double w = chi_m(r.grid[i]) * g.Phi.f;
    proj[i] = r.T1[i] * w;
    norm[i] = w == 0.0 ? 0.0 : r.T1[i] * r.T1[i];
    wn[i] = w * w;
  }
  const double p = quadrature(r.grid, proj, true, Rule::simpson);
  const double scale = std::sqrt(quadrature(r.grid, norm, true, Rule::simpson) * quadrature(r.grid, wn, true, Rule::simpson));
  r.orthogonality = std::abs(p) / scale;
  if (r.orthogonality > opt.orthogonality_tol) {
    raise(ErrorCode::orthogonality_failure, "(T1, chi_M Phi) relative residual " + std::to_string(r.orthogonality));
  }
  return r;
}

ProfileBundle assemble_PB1(double b, const ProfileOptions& opt) {
  const Scales sc(b);
  auto t = build_T1(b, opt);
  const auto cbr = compute_cb(b);
  const auto& grid = t.grid;
  const std::size_t n = grid.size();
  const Cutoff c1{sc.B1};
  const double b2 = b * b;

  std::vector<double> P(n), dP(n), Psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = grid[i];
    const auto g = eval_ground_family(y);
    const Jet x = c1.at(y);
    const double T = t.T1[i], dT = t.dT1[i], d2T = t.d2T1[i];
    const double e = b2 * x.f * T;
    P[i] = g.Q.f + e;
    dP[i] = g.Q.d1 + b2 * (x.d1 * T + x.f * dT);
    if (x.f == 0.0 && x.d1 == 0.0) {
      Psi[i] = b2 * g.Phi.f;
      continue;
    }
    // chi T1 and its two derivatives, for D Lambda (chi T1) = 2h + 4y h' + y^2 h''.
    const double h = x.f * T;
    const double dh = x.d1 * T + x.f * dT;
    const double d2h = x.d2 * T + 2.0 * x.d1 * dT + x.f * d2T;
    const double dlh = 2.0 * h + 4.0 * y * dh + y * y * d2h;
    const double lap_chi = y > 0.0 ? x.d2 + 3.0 / y * x.d1 : 4.0 * x.d2;
    const double chi0 = smoothstep_chi(2.0 * b * y).f;
    // Split form: H T1 + Phi = c_b chi_{B0/4} Lambda Q holds by construction.
    Psi[i] = b2 * x.f * t.cb * chi0 * g.LQ.f +
             b2 * (-2.0 * x.d1 * dT - T * lap_chi + (1.0 - x.f) * g.Phi.f + b2 * dlh) -
             (3.0 * g.Q.f * e * e + e * e * e);
  }

  ProfileBundle pb{b, sc.B0, sc.B1, opt.M, t.cb, t.c, 0.0, cbr, grid,
                   RadialFunction(grid, t.T1, t.dT1), t.d2T1,
                   RadialFunction(grid, std::move(P), std::move(dP), TailLaw{-2.0, 0.0, 8.0}),
                   RadialFunction(grid, std::move(Psi), {}, TailLaw{-4.0, 0.0, -384.0 * b2}),
                   std::nullopt, t.orthogonality, t.switch_jump};

  if (opt.with_db) {
    const double D = cbr.denominator;
    const double dcb = -t.cb / D * cb_denominator_db(b);
    const double cb = t.cb;
    auto dF = [=](double y) {
      const Jet z = smoothstep_chi(2.0 * b * y);
      return (dcb * z.f + cb * 2.0 * y * z.d1) * lambda_Q(y);
    };
    const auto green = solve_H_green(dF, grid, 0.0, opt.M, opt.switch_radius, opt.ode);
    pb.dc_db = green.chi_m_phi_moment / chi_m_phi_lambda_q(opt.M);
    // d log B1 / db
    const double dlogB1 = -(1.0 / b) * (1.0 + 1.0 / sc.log_b());
    std::vector<double> v(n), dv(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double y = grid[i];
      const auto g = eval_ground_family(y);
      const double xb = y / sc.B1;
      const Jet cj = smoothstep_chi(xb);
      const double chi = cj.f, dchi = cj.d1 / sc.B1;
      const double rho = xb * cj.d1;
      const double drho = (cj.d1 + xb * cj.d2) / sc.B1;
      const double dT = green.w[i] - pb.dc_db * g.LQ.f;
      const double ddT = green.dw[i] - pb.dc_db * g.LQ.d1;
      const double T = t.T1[i], Ty = t.dT1[i];
      v[i] = 2.0 * b * chi * T - b2 * dlogB1 * rho * T + b2 * chi * dT;
      dv[i] = 2.0 * b * (dchi * T + chi * Ty) - b2 * dlogB1 * (drho * T + rho * Ty) +
              b2 * (dchi * dT + chi * ddT);
    }
    pb.dP_db = RadialFunction(grid, std::move(v), std::move(dv));
  }
  return pb;
}

double envelope_T1(double y, double b, double M) {
  const Scales sc(b);
  const double lb = sc.log_b();
  double e = (std::log(M) + std::abs(std::log1p(y))) / (1.0 + y * y);
  if (y >= 2.0 && y <= sc.B0 / 2.0) e += (1.0 + std::abs(std::log(b * y))) / lb;
  if (y >= sc.B0 / 2.0) e += 1.0 / (b * b * y * y * lb);
  return e;
}

double envelope_dP(double y, double b, double M) {
  const Scales sc(b);
  return y <= 2.0 * sc.B1 ? b * envelope_T1(y, b, M) : 0.0;
}

double envelope_Psi(double y, double b, double M) {
  const Scales sc(b);
  const double lb = sc.log_b();
  double e = 0.0;
  if (y >= 2.0 && y <= sc.B0 / 2.0) e += (1.0 + std::abs(std::log(b * y))) / lb;
  if (y >= sc.B0 / 2.0 && y <= 2.0 * sc.B1) e += 1.0 / (b * b * y * y * lb);
  if (y <= 2.0 * sc.B1) e += (std::log(M) + std::abs(std::log1p(y))) / (1.0 + y * y);
  e *= b * b * b * b;
  if (y >= sc.B1 / 2.0) e += b * b / (1.0 + y * y * y * y);
  return e;
}

double lambda_P_tilde(double y, double b) {
  const double z = 2.0 * b * y;
  const Jet c = smoothstep_chi(z);
  return c.f * lambda_Q(y) + z * c.d1 * ground_Q(y);
}

FluxResult flux_integral(const ProfileBundle& pb) {
  FluxResult r;
  const double b = pb.b;
  std::vector<double> f(pb.grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = pb.Psi.value[i] * lambda_P_tilde(pb.grid[i], b);
  r.flux = quadrature(pb.grid, f, true, Rule::simpson);
  r.ratio = r.flux / (32.0 * b * b);
  const double cb = pb.cb;
  auto lead = [b, cb](double y) {
    return cb * b * b * smoothstep_chi(2.0 * b * y).f * lambda_Q(y) * lambda_P_tilde(y, b) * y * y * y;
  };
  auto e = geometric_breaks(0.0, 0.5 / b, 0.25, 1.12);
  for (int i = 1; i <= 16; ++i) e.push_back(0.5 / b + 0.5 / b * i / 16.0);
  r.leading = integrate_panels(lead, e, gl20());
  r.leading_ratio = r.leading / (32.0 * b * b);
  return r;
}

}  // namespace critwave
