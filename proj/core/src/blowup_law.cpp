#include "critwave/blowup_law.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "critwave/cutoff.hpp"
#include "critwave/error.hpp"
#include "critwave/groundstate.hpp"
#include "critwave/quadrature.hpp"
#include "critwave/roots.hpp"

namespace critwave {

namespace {

const GaussLegendre& gl20() {
  static const GaussLegendre rule(20);
  return rule;
}

void check_b(double b) {
  if (!(b > 0.0 && b <= 0.1)) raise(ErrorCode::domain_error, "b must lie in (0, 0.1]");
}

std::vector<double> transition_breaks(double b) {
  std::vector<double> br(17);
  const double lo = 0.5 / b;
  for (std::size_t i = 0; i < br.size(); ++i) br[i] = lo + lo * static_cast<double>(i) / 16.0;
  return br;
}

// Lambda P~ = chi(x) Lambda Q + x chi'(x) Q with x = 2 b y.
double lambda_P_tilde(double b, double y) {
  const Jet c = smoothstep_chi(2.0 * b * y);
  return c.f * lambda_Q(y) + 2.0 * b * y * c.d1 * ground_Q(y);
}

}  // namespace

double lambda_P_tilde_norm2(double b) {
  check_b(b);
  auto f = [b](double y) {
    const double l = lambda_P_tilde(b, y);
    return l * l * y * y * y;
  };
  return integrate_panels(f, geometric_breaks(0.0, 0.5 / b, 0.25, 1.12), gl20()) +
         integrate_panels(f, transition_breaks(b), gl20());
}

double dbP_tilde_dot_lambda(double b) {
  check_b(b);
  // d_b P~ = 2 y chi'(2 b y) Q, supported on [1/(2b), 1/b].
  auto f = [b](double y) {
    const double dP = 2.0 * y * smoothstep_chi(2.0 * b * y).d1 * ground_Q(y);
    return dP * lambda_P_tilde(b, y) * y * y * y;
  };
  return integrate_panels(f, transition_breaks(b), gl20());
}

GResult G_functional(double b) {
  check_b(b);
  GResult r;
  r.b = b;
  r.leading = b * lambda_P_tilde_norm2(b);
  // b' (d_b P~, Lambda P~) tends to a constant as b' -> 0; substitute b' = b z.
  r.integral = b * gl20().integrate([b](double z) { return b * z * dbP_tilde_dot_lambda(b * z); }, 0.0, 1.0);
  r.G = r.leading + r.integral;
  r.normalized = r.G / (64.0 * b * -std::log(b));
  return r;
}

double J_from_b(double b) {
  if (!(b > 0.0 && b < 0.1)) raise(ErrorCode::domain_error, "b must lie in (0, 0.1)");
  return find_root([b](double J) { return J / (64.0 * -std::log(J)) - b; }, {1e-300, 0.99}, 1e-15,
                   RootMethod::bisection)
      .root;
}

BlowupTrajectory integrate_reduced_system(double b0, ReducedMode mode, const ReducedOptions& opt) {
  if (!(b0 > 1e-6 && b0 <= 0.05)) raise(ErrorCode::domain_error, "b0 must lie in (1e-6, 0.05]");
  BlowupTrajectory tr;
  tr.mode = mode;
  const bool jmode = mode == ReducedMode::J_ode;
  auto b_of = [jmode](double x) { return jmode ? x / (64.0 * -std::log(x)) : x; };
  // State: (b or J, log lambda, t).
  DormandPrince<3> dp(
      [&](double, const std::array<double, 3>& y, std::array<double, 3>& d) {
        const double L = -std::log(y[0]);
        d[0] = jmode ? -y[0] * y[0] / (128.0 * L * L) : -y[0] * y[0] / (2.0 * L);
        d[1] = -b_of(y[0]);
        d[2] = std::exp(y[1]);
      },
      opt.ode);
  double s = 0.0;
  std::array<double, 3> y{jmode ? J_from_b(b0) : b0, 0.0, 0.0};
  std::vector<double> tf;
  auto record = [&] {
    tr.s.push_back(s);
    tr.b.push_back(b_of(y[0]));
    tr.log_lambda.push_back(y[1]);
    tr.J.push_back(jmode ? y[0] : 64.0 * y[0] * -std::log(y[0]));
    tf.push_back(y[2]);
  };
  record();
  const double span = std::log1p(opt.s_max);
  for (std::size_t k = 1; k < opt.samples; ++k) {
    const double target = std::expm1(span * static_cast<double>(k) / (opt.samples - 1));
    dp.advance(s, y, target);
    if (b_of(y[0]) > tr.b.back()) raise(ErrorCode::non_monotone_b, "b increased along the reduced flow");
    record();
    if (tr.b.back() < opt.b_floor) {
      tr.termination = Termination::floor_reached;
      break;
    }
  }

  // T - t = int_s^inf lambda: backward sums with lambda exponential on each
  // panel, closed by lambda/b beyond the last sample.
  const std::size_t n = tr.s.size();
  tr.T_minus_t.assign(n, 0.0);
  tr.T_minus_t[n - 1] = std::exp(tr.log_lambda[n - 1]) / tr.b[n - 1];
  auto panel = [&](std::size_t k) {
    const double ds = tr.s[k + 1] - tr.s[k];
    const double l0 = tr.log_lambda[k], l1 = tr.log_lambda[k + 1];
    const double dl = l0 - l1;
    return dl < 1e-12 ? ds * std::exp(0.5 * (l0 + l1)) : ds * (std::exp(l0) - std::exp(l1)) / dl;
  };
  for (std::size_t k = n - 1; k-- > 0;) tr.T_minus_t[k] = tr.T_minus_t[k + 1] + panel(k);
  tr.T = tr.T_minus_t[0];
  tr.t.resize(n);
  for (std::size_t k = 0; k < n; ++k) tr.t[k] = tr.T - tr.T_minus_t[k];

  // int dt/lambda from the forward t, while t is still resolved.
  double s_rec = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dt = tf[k + 1] - tf[k];
    if (dt < 1e-10 * tf[k + 1]) break;
    const double l0 = tr.log_lambda[k], l1 = tr.log_lambda[k + 1];
    const double dl = l0 - l1;
    // Exact for lambda exponential in s: int dt / lambda = ds.
    const double lam_mean = dl < 1e-12 ? std::exp(0.5 * (l0 + l1)) : (std::exp(l0) - std::exp(l1)) / dl;
    s_rec += dt / lam_mean;
    tr.time_consistency = std::max(tr.time_consistency, std::abs(s_rec - tr.s[k + 1]) / tr.s[k + 1]);
  }

  for (std::size_t k = 0; k < n; ++k) {
    tr.scaling_bound = std::max(tr.scaling_bound, std::exp(tr.log_lambda[k]) / tr.T_minus_t[k]);
  }
  const double sl = tr.s.back();
  const double ls = std::log(sl);
  tr.b_law_ratio = tr.b.back() * sl / (2.0 * ls);
  tr.lambda_law_ratio = -tr.log_lambda.back() / (ls * ls);
  const double tau = tr.T_minus_t.back();
  const double lt = std::log(tau);
  tr.speed_law_ratio = tr.log_lambda.back() / (lt - std::sqrt(std::abs(lt)));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (tr.s[k] < 0.1 * sl || tr.s[k] <= 1.0) continue;
    const double x = std::pow(std::log(tr.s[k]), 2), v = -tr.log_lambda[k];
    sx += x, sy += v, sxx += x * x, sxy += x * v, ++m;
  }
  if (m > 1) tr.lambda_fit_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return tr;
}

ModeState modes_from_raw(double a, double a_s, double zeta) {
  const double k = std::sqrt(zeta);
  return {0.5 * (a + a_s / k), 0.5 * (a - a_s / k)};
}

std::array<double, 2> raw_from_modes(const ModeState& m, double zeta) {
  const double k = std::sqrt(zeta);
  return {m.kappa_plus + m.kappa_minus, k * (m.kappa_plus - m.kappa_minus)};
}

ModeState linear_mode_step(const ModeState& st, double ds, std::array<double, 2> forcing, double zeta) {
  const double k = std::sqrt(zeta);
  const double ep = std::exp(k * ds), em = std::exp(-k * ds);
  return {ep * st.kappa_plus + std::expm1(k * ds) / k * forcing[0] / (2.0 * k),
          em * st.kappa_minus + std::expm1(-k * ds) / k * forcing[1] / (2.0 * k)};
}

namespace {

double forcing_amplitude(double b) { return std::sqrt(b) * b * b / -std::log(b); }

}  // namespace

ExitRecord run_mode_toy(double b0, double a_plus, const DichotomyOptions& opt) {
  const double k = std::sqrt(opt.zeta);
  const double on = opt.forcing_on ? 1.0 : 0.0;
  DormandPrince<3> dp(
      [&](double s, const std::array<double, 3>& y, std::array<double, 3>& d) {
        const double b = y[0];
        const double L = -std::log(b);
        const double E = on * forcing_amplitude(b);
        d[0] = -b * b / (2.0 * L);
        d[1] = k * y[1] + E * std::sin(s) / (2.0 * k);
        d[2] = -k * y[2] - E * std::cos(s) / (2.0 * k);
      },
      opt.ode);
  double s = 0.0;
  std::array<double, 3> y{b0, a_plus, 0.0};
  ExitRecord rec;
  while (s < opt.s_max) {
    dp.advance(s, y, std::min(s + opt.check_ds, opt.s_max));
    const double b = y[0];
    const double scale = b * b / -std::log(b);
    rec.max_kappa_minus = std::max(rec.max_kappa_minus, std::abs(y[2]) / scale);
    if (std::abs(y[1]) > 2.0 * scale) {
      rec.sign = y[1] > 0.0 ? 1 : -1;
      rec.s_exit = s;
      rec.b_exit = b;
      return rec;
    }
  }
  rec.s_exit = s;
  rec.b_exit = y[0];
  return rec;
}

DichotomyResult dichotomy_demo(double b0, const DichotomyOptions& opt) {
  if (!(b0 > 1e-6 && b0 <= 0.05)) raise(ErrorCode::domain_error, "b0 must lie in (1e-6, 0.05]");
  DichotomyResult res;
  res.b0 = b0;
  const double A = b0 * b0 / -std::log(b0);
  double lo = -A, hi = A;
  auto f_lo = std::async(std::launch::async, [&] { return run_mode_toy(b0, lo, opt); });
  const auto r_hi = run_mode_toy(b0, hi, opt);
  const auto r_lo = f_lo.get();
  if (!(r_lo.sign == -1 && r_hi.sign == 1)) {
    raise(ErrorCode::no_dichotomy, "bracket endpoints do not exit on opposite sides");
  }
  const double tol = opt.bracket_tol * b0 * b0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const auto r = run_mode_toy(b0, mid, opt);
    ++res.bisection_steps;
    if (r.sign == 0) {
      lo = hi = mid;
      break;
    }
    (r.sign > 0 ? hi : lo) = mid;
  }
  res.a_star = 0.5 * (lo + hi);
  res.bracket_width = hi - lo;
  res.at_star = run_mode_toy(b0, res.a_star, opt);
  const double pert = 1e-6 * b0 * b0;
  res.above = run_mode_toy(b0, res.a_star + pert, opt);
  res.below = run_mode_toy(b0, res.a_star - pert, opt);
  res.predicted_exit = std::log(2.0 * A / pert) / std::sqrt(opt.zeta);
  res.scaled_a_star = res.a_star / A;

  // The unstable coordinate stays bounded only if it starts at minus the
  // discounted forcing integral.
  const double k = std::sqrt(opt.zeta);
  const double on = opt.forcing_on ? 1.0 : 0.0;
  DormandPrince<2> dp(
      [&](double s, const std::array<double, 2>& y, std::array<double, 2>& d) {
        const double b = y[0];
        d[0] = -b * b / (2.0 * -std::log(b));
        d[1] = std::exp(-k * s) * on * forcing_amplitude(b) * std::sin(s) / (2.0 * k);
      },
      opt.ode);
  double s = 0.0;
  std::array<double, 2> y{b0, 0.0};
  dp.advance(s, y, opt.s_max);
  res.a_star_duhamel = -y[1];
  return res;
}

}  // namespace critwave
