#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <string>

#include "critwave/cutoff.hpp"
#include "critwave/error.hpp"
#include "critwave/groundstate.hpp"
#include "critwave/quadrature.hpp"
#include "critwave/wave_sim.hpp"

namespace critwave {

namespace {

// Pairwise nonuniform Simpson weights for int f r^3 dr over nodes [0, end];
// an odd trailing interval gets the trapezoid.
std::vector<double> simpson_weights(std::span<const double> r, std::size_t end) {
  std::vector<double> w(end + 1, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= end; i += 2) {
    const double h0 = r[i + 1] - r[i], h1 = r[i + 2] - r[i + 1];
    const double c = (h0 + h1) / 6.0;
    w[i] += c * (2.0 - h1 / h0);
    w[i + 1] += c * (h0 + h1) * (h0 + h1) / (h0 * h1);
    w[i + 2] += c * (2.0 - h0 / h1);
  }
  if (i < end) {
    const double h = r[end] - r[end - 1];
    w[end - 1] += 0.5 * h;
    w[end] += 0.5 * h;
  }
  for (std::size_t k = 0; k <= end; ++k) w[k] *= r[k] * r[k] * r[k];
  return w;
}

// Last node index with r <= reach (at least 2, at most n-1).
std::size_t support_end(const RadialGrid& g, double reach) {
  if (reach >= g.r_max()) return g.size() - 1;
  return std::max<std::size_t>(2, g.locate(reach) + 1);
}

double log_b_abs(double b) { return -std::log(b); }

}  // namespace

struct ModulationContext::Table {
  double b_lo = 0.0, db = 0.0;
  std::vector<ProfileBundle> bundles;
  std::vector<double> P_psi, dbP_psi;
  std::size_t initial = 0;

  // Four-point Lagrange stencil in b.
  std::pair<std::size_t, std::array<double, 4>> stencil(double b) const {
    const std::size_t n = bundles.size();
    const double x = (b - b_lo) / db;
    const auto j = static_cast<std::size_t>(std::clamp(std::floor(x) - 1.0, 0.0, static_cast<double>(n - 4)));
    std::array<double, 4> w{};
    for (int a = 0; a < 4; ++a) {
      double p = 1.0;
      for (int c = 0; c < 4; ++c) {
        if (c != a) p *= (x - static_cast<double>(j + c)) / static_cast<double>(a - c);
      }
      w[a] = p;
    }
    return {j, w};
  }
  double scalar(const std::vector<double>& v, double b) const {
    const auto [j, w] = stencil(b);
    return w[0] * v[j] + w[1] * v[j + 1] + w[2] * v[j + 2] + w[3] * v[j + 3];
  }
};

ModulationContext::ModulationContext(double b0, const Options& opt)
    : b0_(b0), opt_(opt), psi_(solve_eigenpair()) {
  if (!(b0 > 0.0 && b0 <= 0.05)) raise(ErrorCode::domain_error, "b0 must lie in (0, 0.05]");
  if (opt.b_nodes < 4 || !(opt.b_low > 0.0 && opt.b_low < 1.0 && opt.b_high > 1.0)) {
    raise(ErrorCode::domain_error, "modulation table needs >= 4 nodes spanning b0");
  }
  auto table = std::make_shared<Table>();
  const std::size_t n = opt.b_nodes;
  // Nodes placed so that b0 is one of them.
  const double lo = opt.b_low * b0, hi = opt.b_high * b0;
  const auto below = static_cast<std::size_t>(
      std::round(static_cast<double>(n - 1) * (b0 - lo) / (hi - lo)));
  table->db = below > 0 ? (b0 - lo) / static_cast<double>(below) : (hi - b0) / static_cast<double>(n - 1);
  table->b_lo = b0 - table->db * static_cast<double>(below);
  table->initial = below;
  table->bundles.resize(n, assemble_PB1(b0, ProfileOptions{.M = opt.M}));
  const unsigned workers = std::max(1u, opt.workers);
  auto build = [&](unsigned part) {
    for (std::size_t k = part; k < n; k += workers) {
      if (k == below) continue;
      table->bundles[k] = assemble_PB1(table->b_lo + table->db * static_cast<double>(k), ProfileOptions{.M = opt.M});
    }
  };
  std::vector<std::future<void>> jobs;
  for (unsigned p = 1; p < workers; ++p) jobs.push_back(std::async(std::launch::async, build, p));
  build(0);
  for (auto& j : jobs) j.get();

  const auto& psi = psi_.psi;
  std::vector<double> sq(psi.grid.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = psi.value[i] * psi.value[i];
  psi_norm2_ = quadrature(psi.grid, sq, true, Rule::simpson);
  table->P_psi.resize(n);
  table->dbP_psi.resize(n);
  std::vector<double> f(psi.grid.size()), g(psi.grid.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& pb = table->bundles[k];
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double y = psi.grid[i];
      f[i] = pb.P(y) * psi.value[i];
      g[i] = (*pb.dP_db)(y)*psi.value[i];
    }
    table->P_psi[k] = quadrature(psi.grid, f, true, Rule::simpson);
    table->dbP_psi[k] = quadrature(psi.grid, g, true, Rule::simpson);
  }

  const Cutoff chi{opt.M};
  auto q = [&chi](double y) { return ground_Q(y) * chi(y) * phi_DLQ(y) * y * y * y; };
  std::vector<double> e(81);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = 2.0 * opt.M * static_cast<double>(i) / 80.0;
  c0_ = integrate_panels(q, e, GaussLegendre(20));
  table_ = std::move(table);
}

const ProfileBundle& ModulationContext::initial_profile() const { return table_->bundles[table_->initial]; }

bool ModulationContext::in_table(double b) const {
  const double hi = table_->b_lo + table_->db * static_cast<double>(table_->bundles.size() - 1);
  return b >= table_->b_lo && b <= hi;
}

double ModulationContext::P_psi(double b) const { return table_->scalar(table_->P_psi, b); }
double ModulationContext::dbP_psi(double b) const { return table_->scalar(table_->dbP_psi, b); }

double ModulationContext::P(double b, double y) const {
  const auto [j, w] = table_->stencil(b);
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    const auto& pb = table_->bundles[j + a];
    s += w[a] * (y <= pb.grid.r_max() ? pb.P(y) : ground_Q(y));
  }
  return s;
}

double ModulationContext::dP(double b, double y) const {
  const auto [j, w] = table_->stencil(b);
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    const auto& pb = table_->bundles[j + a];
    s += w[a] * (y <= pb.grid.r_max() ? pb.P.derivative(y) : eval_ground_family(y).Q.d1);
  }
  return s;
}

double ModulationContext::dbP(double b, double y) const {
  const auto [j, w] = table_->stencil(b);
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    const auto& pb = table_->bundles[j + a];
    if (y <= pb.grid.r_max()) s += w[a] * (*pb.dP_db)(y);
  }
  return s;
}

double ModulationContext::weight(double y) const { return Cutoff{opt_.M}(y)*phi_DLQ(y); }

double ModulationContext::weight_d1(double y) const {
  const Jet c = Cutoff{opt_.M}.at(y);
  const auto g = eval_ground_family(y);
  return c.d1 * g.Phi.f + c.f * g.Phi.d1;
}

Extraction extract_modulation(const WaveState& state, const ModulationContext& ctx, double lambda_guess,
                              const NewtonOptions& opt) {
  const auto& g = state.grid;
  const auto r = g.nodes();
  const auto& u = state.u;
  const auto& ut = state.ut;
  if (!(lambda_guess > 0.0) || !std::isfinite(lambda_guess)) {
    raise(ErrorCode::newton_diverged, "invalid lambda warm start");
  }
  const double reach = 2.0 * ctx.M();
  double mu = std::log(lambda_guess);
  double b = ctx.b0();
  Extraction ex;
  auto fail = [&](const std::string& why) {
    raise(ErrorCode::newton_diverged, "modulation extraction failed: " + why);
  };
  // All products are (f, h)_y = lambda^-4 int f(r/lambda) h(r/lambda) r^3 dr on
  // the simulation nodes, so eps = 0 is an exact zero of the discrete constraint.
  for (int it = 1; it <= opt.max_iter; ++it) {
    const double lam = std::exp(mu);
    if (!(lam * reach < g.r_max())) fail("lambda " + std::to_string(lam) + " pushes chi_M Phi off the grid");
    const std::size_t end = support_end(g, lam * reach);
    const auto wq = simpson_weights(r, end);
    const double scale = 1.0 / (lam * lam * lam * lam);
    double eps_w = 0.0, lv_w = 0.0, ut_w = 0.0;
    for (std::size_t i = 0; i <= end; ++i) {
      const double y = r[i] / lam;
      const double w = ctx.weight(y);
      const double dw = ctx.weight_d1(y);
      const double v = lam * u[i];
      eps_w += wq[i] * (v - ctx.P(b, y)) * w;
      lv_w -= wq[i] * v * (3.0 * w + y * dw);
      ut_w += wq[i] * lam * ut[i] * w;
    }
    eps_w *= scale;
    lv_w *= scale;
    ut_w *= scale;
    if (!std::isfinite(eps_w) || !std::isfinite(lv_w) || lv_w == 0.0) fail("non-finite projections");
    // d/dmu (v, w) = (Lambda v, w); (P_b, w) does not move with lambda.
    double step = -eps_w / lv_w;
    step = std::clamp(step, -opt.max_log_step, opt.max_log_step);
    mu += step;
    // b = lambda ((u_t)_{1/lambda}, w) / ((Lambda u)_{1/lambda}, w), (u_t)_{1/lambda} = lambda u_t(lambda y).
    b = lam * ut_w / lv_w;
    if (!(b > 0.0) || !ctx.in_table(b)) fail("b = " + std::to_string(b) + " left the tabulated range");
    ex.iterations = it;
    ex.constraint = eps_w;
    if (std::abs(step) < opt.tol) break;
    if (it == opt.max_iter) fail("no convergence in " + std::to_string(opt.max_iter) + " iterations");
  }
  ex.lambda = std::exp(mu);
  ex.b = b;

  const double lam = ex.lambda;
  const auto& psi = ctx.psi().psi;
  const std::size_t end = support_end(g, lam * psi.grid.r_max());
  const auto wq = simpson_weights(r, end);
  const double scale = 1.0 / (lam * lam * lam * lam);
  double a = 0.0, ds = 0.0, cons = 0.0;
  const std::size_t wend = support_end(g, lam * reach);
  for (std::size_t i = 0; i <= end; ++i) {
    const double y = r[i] / lam;
    const double p = psi(y), dp = psi.derivative(y);
    const double v = lam * u[i];
    a += wq[i] * (v - ctx.P(b, y)) * p;
    // lambda (u_t)_{1/lambda} - b Lambda v, with (Lambda v, psi) = -(v, 3 psi + y psi')
    ds += wq[i] * (lam * lam * ut[i] * p + b * v * (3.0 * p + y * dp));
  }
  const auto wq2 = simpson_weights(r, wend);
  for (std::size_t i = 0; i <= wend; ++i) {
    const double y = r[i] / lam;
    cons += wq2[i] * (lam * u[i] - ctx.P(b, y)) * ctx.weight(y);
  }
  ex.eps_psi = a * scale;
  ex.ds_eps_psi = ds * scale;
  ex.constraint = cons * scale;
  return ex;
}

EpsilonField epsilon_field(const WaveState& state, const Extraction& ex, const ModulationContext& ctx) {
  const auto r = state.grid.nodes();
  const double lam = ex.lambda, b = ex.b;
  std::vector<double> y(r.size()), eps(r.size()), ds(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    y[i] = r[i] / lam;
    const double v = lam * state.u[i];
    // Lambda v = v + y v' with y v'(y) = lambda r u_r; u_r by centered differences.
    double ur = 0.0;
    if (i == 0) {
      ur = 0.0;
    } else if (i + 1 < r.size()) {
      ur = (state.u[i + 1] - state.u[i - 1]) / (r[i + 1] - r[i - 1]);
    } else {
      ur = (state.u[i] - state.u[i - 1]) / (r[i] - r[i - 1]);
    }
    eps[i] = v - ctx.P(b, y[i]);
    ds[i] = lam * lam * state.ut[i] - b * (v + lam * r[i] * ur);
  }
  return {RadialGrid::from_nodes(std::move(y)), std::move(eps), std::move(ds)};
}

ModeState project_modes(double eps_psi, double ds_eps_psi, double zeta, double b_s, double dbP_psi) {
  return modes_from_raw(eps_psi, ds_eps_psi + b_s * dbP_psi, zeta);
}

ModeState project_modes(const RadialFunction& eps, const RadialFunction& ds_eps, const EigenPair& psi, double b_s,
                        double dbP_psi) {
  const auto& pg = psi.psi.grid;
  std::vector<double> f(pg.size()), h(pg.size());
  for (std::size_t i = 0; i < pg.size(); ++i) {
    f[i] = eps(pg[i]) * psi.psi.value[i];
    h[i] = ds_eps(pg[i]) * psi.psi.value[i];
  }
  return project_modes(quadrature(pg, f, true, Rule::simpson), quadrature(pg, h, true, Rule::simpson), psi.zeta,
                       b_s, dbP_psi);
}

double calE(const WaveState& state, const Extraction& ex, const ModulationContext& ctx, const RadialLaplacian& lap,
            double b_s) {
  const auto r = state.grid.nodes();
  // Only nodes the frozen outer boundary cannot have influenced by time t.
  const double reach = state.grid.r_max() - state.t - 1.0;
  if (!(reach > r[2])) raise(ErrorCode::grid_too_short, "boundary influence covers the whole grid");
  const std::size_t n = state.grid.locate(reach) + 1;
  const double lam = ex.lambda, b = ex.b;
  const double b_t = b_s / lam;
  std::vector<double> w(n + 1), wt(n + 1), lw(r.size()), V(n);
  for (std::size_t i = 0; i <= n; ++i) {
    const double y = r[i] / lam;
    const double P = ctx.P(b, y);
    const double LP = P + y * ctx.dP(b, y);
    w[i] = state.u[i] - P / lam;
    wt[i] = state.ut[i] - (b / (lam * lam)) * LP - (b_t / lam) * ctx.dbP(b, y);
    if (i < n) V[i] = potential_V(y) / (lam * lam);
  }
  std::vector<double> wfull(r.size(), 0.0);
  std::copy(w.begin(), w.end(), wfull.begin());
  lap.apply(wfull, lw);
  const auto vol = lap.volumes();
  double pot = 0.0, hw2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pot += vol[i] * V[i] * wt[i] * wt[i];
    const double h = lw[i] + V[i] * w[i];
    hw2 += vol[i] * h * h;
  }
  return lam * lam * (2.0 * lap.gradient_energy(wt) - pot + hw2);
}

ModulationTrace run_trajectory(const InitialData& data, const ModulationContext& ctx, const SimulationOptions& opt) {
  const double zeta = ctx.zeta(), sz = std::sqrt(zeta);
  const double s_h = opt.s_horizon > 0.0 ? opt.s_horizon : 20.0 / sz;
  WaveGridSpec spec = opt.grid;
  const Scales sc(data.b0);
  if (spec.r_max <= 0.0) spec.r_max = 4.0 * sc.B1;
  if (opt.cadence < 1) raise(ErrorCode::domain_error, "extraction cadence must be >= 1");
  // lambda stays below 1 in the trapped regime, so t <= s; the margin covers exits.
  const double t_run = 1.2 * s_h;
  auto init = init_data(data, ctx, spec, t_run, opt.cfl);
  WaveSolver solver(std::move(init.state), opt.scheme, true);
  const double dt = solver.default_dt();

  ModulationTrace tr;
  tr.d_plus = data.d_plus;
  tr.kappa_plus_intended = init.kappa_plus_intended;
  std::vector<double> a_raw, ds_raw;
  double lam_prev = 1.0, s = 0.0;
  for (;;) {
    const auto& st = solver.state();
    const auto ex = extract_modulation(st, ctx, lam_prev);
    if (!tr.t.empty()) s += 0.5 * (st.t - tr.t.back()) * (1.0 / lam_prev + 1.0 / ex.lambda);
    lam_prev = ex.lambda;
    const double q = ctx.dbP_psi(ex.b);
    double b_s = 0.0;
    if (!tr.s.empty() && s > tr.s.back()) b_s = (ex.b - tr.b.back()) / (s - tr.s.back());
    const ModeState m = opt.kappa_correction ? project_modes(ex.eps_psi, ex.ds_eps_psi, zeta)
                                             : project_modes(ex.eps_psi, ex.ds_eps_psi - b_s * q, zeta);
    tr.t.push_back(st.t);
    tr.s.push_back(s);
    tr.lambda.push_back(ex.lambda);
    tr.b.push_back(ex.b);
    tr.kappa_plus.push_back(m.kappa_plus);
    tr.kappa_minus.push_back(m.kappa_minus);
    a_raw.push_back(ex.eps_psi);
    ds_raw.push_back(ex.ds_eps_psi);
    if (opt.diagnostics) {
      tr.calE.push_back(calE(st, ex, ctx, solver.laplacian(), b_s));
      tr.energy.push_back(solver.energy());
      const auto ef = epsilon_field(st, ex, ctx);
      const std::size_t end = support_end(st.grid, ex.lambda * 2.0 * ctx.M());
      const auto wq = simpson_weights(st.grid.nodes(), end);
      double n2 = 0.0;
      for (std::size_t i = 0; i <= end; ++i) n2 += wq[i] * ef.eps[i] * ef.eps[i];
      n2 /= std::pow(ex.lambda, 4);
      tr.constraint.push_back(std::abs(ex.constraint) / std::sqrt(n2));
    }
    const double level = std::abs(m.kappa_plus) * log_b_abs(ex.b) / (ex.b * ex.b);
    if (level >= opt.exit_level) {
      tr.exit_sign = m.kappa_plus > 0.0 ? 1 : -1;
      tr.s_exit = s;
      break;
    }
    if (s >= s_h) {
      tr.s_exit = s;
      break;
    }
    solver.advance(dt, static_cast<std::size_t>(opt.cadence));
  }

  const std::size_t n = tr.t.size();
  tr.b_s.assign(n, 0.0);
  tr.lambda_t.assign(n, 0.0);
  tr.kappa_plus_uncorrected.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (n >= 2) {
      const std::size_t lo = k == 0 ? 0 : k - 1, hi = k + 1 < n ? k + 1 : n - 1;
      tr.b_s[k] = (tr.b[hi] - tr.b[lo]) / (tr.s[hi] - tr.s[lo]);
      tr.lambda_t[k] = -(tr.lambda[hi] - tr.lambda[lo]) / (tr.t[hi] - tr.t[lo]);
    }
    tr.kappa_plus_uncorrected[k] =
        modes_from_raw(a_raw[k], ds_raw[k] - tr.b_s[k] * ctx.dbP_psi(tr.b[k]), zeta).kappa_plus;
  }
  return tr;
}

EnvelopeFit fit_envelopes(const ModulationTrace& tr, double skip_s) {
  EnvelopeFit f;
  const std::size_t n = tr.t.size();
  if (n < 3) return f;
  const double b0 = tr.b.front();
  // Least-squares slopes in s for the trend checks.
  auto slope = [&](const std::vector<double>& v) {
    double ms = 0.0, mv = 0.0;
    for (std::size_t k = 0; k < n; ++k) ms += tr.s[k], mv += v[k];
    ms /= static_cast<double>(n);
    mv /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      num += (tr.s[k] - ms) * (v[k] - mv);
      den += (tr.s[k] - ms) * (tr.s[k] - ms);
    }
    return num / den;
  };
  f.b_decreasing = slope(tr.b) < 0.0 && tr.b.back() < tr.b.front();
  f.lambda_decreasing = slope(tr.lambda) < 0.0 && tr.lambda.back() < tr.lambda.front();
  for (std::size_t k = 0; k < n; ++k) {
    const double b = tr.b[k], lb = log_b_abs(b);
    const double b2 = b * b;
    f.b_max_ratio = std::max(f.b_max_ratio, b / b0);
    if (tr.s[k] < skip_s) continue;
    if (k > 0 && k + 1 < n) f.K_bs = std::max(f.K_bs, tr.b_s[k] * tr.b_s[k] * lb * lb / (b2 * b2));
    if (!tr.calE.empty()) f.K_calE = std::max(f.K_calE, tr.calE[k] * lb * lb / (b2 * b2));
    f.K_kappa_minus = std::max(f.K_kappa_minus, std::abs(tr.kappa_minus[k]) * lb / b2);
    f.K_kappa_plus = std::max(f.K_kappa_plus, std::abs(tr.kappa_plus[k]) * lb / b2);
  }
  return f;
}

GrowthFit fit_growth(const ModulationTrace& p, const ModulationTrace& c, double zeta, double s_from) {
  GrowthFit g;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < p.s.size(); ++k) {
    const double s = p.s[k];
    if (s < s_from || s > c.s.back()) continue;
    const auto it = std::upper_bound(c.s.begin(), c.s.end(), s);
    if (it == c.s.begin() || it == c.s.end()) continue;
    const std::size_t j = static_cast<std::size_t>(it - c.s.begin());
    const double th = (s - c.s[j - 1]) / (c.s[j] - c.s[j - 1]);
    const double kc = (1.0 - th) * c.kappa_plus[j - 1] + th * c.kappa_plus[j];
    const double d = std::abs(p.kappa_plus[k] - kc);
    if (d <= 0.0) continue;
    xs.push_back(s);
    ys.push_back(std::log(d));
  }
  if (xs.size() < 5) raise(ErrorCode::domain_error, "growth fit needs at least 5 samples past s_from");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    num += (xs[k] - mx) * (ys[k] - my);
    den += (xs[k] - mx) * (xs[k] - mx);
  }
  g.rate = num / den;
  g.relative_error = std::abs(g.rate / std::sqrt(zeta) - 1.0);
  g.s_from = xs.front();
  g.s_to = xs.back();
  return g;
}

namespace {

int decision_sign(const ModulationTrace& tr) {
  if (tr.exit_sign != 0) return tr.exit_sign;
  return tr.kappa_plus.back() > 0.0 ? 1 : -1;
}

std::vector<ModulationTrace> run_batch(const std::vector<double>& ds, const InitialData& base,
                                       const ModulationContext& ctx, const SimulationOptions& sim, unsigned workers) {
  std::vector<ModulationTrace> out(ds.size());
  auto one = [&](std::size_t k) {
    InitialData d = base;
    d.d_plus = ds[k];
    out[k] = run_trajectory(d, ctx, sim);
  };
  workers = std::max(1u, workers);
  for (std::size_t start = 0; start < ds.size(); start += workers) {
    std::vector<std::future<void>> jobs;
    const std::size_t stop = std::min(ds.size(), start + workers);
    for (std::size_t k = start + 1; k < stop; ++k) jobs.push_back(std::async(std::launch::async, one, k));
    one(start);
    for (auto& j : jobs) j.get();
  }
  return out;
}

}  // namespace

BisectResult run_and_bisect(const ModulationContext& ctx, const BisectOptions& opt, const InitialData& base_in) {
  InitialData base = base_in;
  base.b0 = ctx.b0();
  const double b0 = base.b0, unit = b0 * b0;
  BisectResult res;
  res.b0 = b0;
  SimulationOptions fast = opt.sim;
  fast.diagnostics = false;

  const std::size_t m = std::max<std::size_t>(opt.sweep_points, 2);
  for (std::size_t k = 0; k < m; ++k) {
    res.sweep_d.push_back(opt.bracket_scale * unit * (-1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(m - 1)));
  }
  const auto sweep = run_batch(res.sweep_d, base, ctx, fast, opt.workers);
  for (const auto& tr : sweep) res.sweep_sign.push_back(decision_sign(tr));
  res.monotone = std::is_sorted(res.sweep_sign.begin(), res.sweep_sign.end()) ||
                 std::is_sorted(res.sweep_sign.rbegin(), res.sweep_sign.rend());
  const int s_lo = res.sweep_sign.front(), s_hi = res.sweep_sign.back();
  if (s_lo == s_hi) {
    raise(ErrorCode::no_dichotomy, "exit signs agree at both ends of the d+ bracket (" + std::to_string(s_lo) + ")");
  }
  // Narrow to the first sign change of the sweep.
  double lo = res.sweep_d.front(), hi = res.sweep_d.back();
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (res.sweep_sign[k] == s_lo && res.sweep_sign[k + 1] != s_lo) {
      lo = res.sweep_d[k];
      hi = res.sweep_d[k + 1];
      break;
    }
  }
  const unsigned w = std::max(1u, opt.workers);
  while (hi - lo > opt.bracket_tol * unit) {
    std::vector<double> ds(w);
    for (unsigned k = 0; k < w; ++k) ds[k] = lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(w + 1);
    const auto runs = run_batch(ds, base, ctx, fast, w);
    double new_lo = lo, new_hi = hi;
    for (unsigned k = 0; k < w; ++k) {
      if (decision_sign(runs[k]) == s_lo) {
        new_lo = ds[k];
      } else {
        new_hi = ds[k];
        break;
      }
    }
    if (new_lo == lo && new_hi == hi) break;
    lo = new_lo;
    hi = new_hi;
    ++res.rounds;
  }
  res.d_star = 0.5 * (lo + hi);
  res.bracket_width = hi - lo;

  SimulationOptions diag = opt.sim;
  diag.diagnostics = true;
  const double pert = opt.perturbation * unit;
  const auto finals = run_batch({res.d_star, res.d_star + pert, res.d_star - pert}, base, ctx, diag, std::min(3u, w));
  res.critical = finals[0];
  res.above = finals[1];
  res.below = finals[2];
  res.envelopes = fit_envelopes(res.critical);
  const double zeta = ctx.zeta();
  res.growth_above = fit_growth(res.above, res.critical, zeta);
  res.growth_below = fit_growth(res.below, res.critical, zeta);
  for (std::size_t k = 0; k < res.critical.t.size(); ++k) {
    const double b = res.critical.b[k];
    res.kappa_correction_shift =
        std::max(res.kappa_correction_shift,
                 std::abs(res.critical.kappa_plus[k] - res.critical.kappa_plus_uncorrected[k]) * log_b_abs(b) / (b * b));
  }
  return res;
}

}  // namespace critwave
