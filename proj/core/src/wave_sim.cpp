#include "critwave/wave_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "critwave/error.hpp"
#include "critwave/groundstate.hpp"

namespace critwave {

RadialGrid wave_grid(const WaveGridSpec& spec) {
  if (spec.nodes < 16) raise(ErrorCode::domain_error, "wave grid needs at least 16 nodes");
  if (!(spec.h0 > 0.0) || !(spec.r_max > spec.h0)) {
    raise(ErrorCode::domain_error, "wave grid needs 0 < h0 < r_max");
  }
  if (spec.h0 * static_cast<double>(spec.nodes - 1) >= spec.r_max) {
    return RadialGrid::uniform(0.0, spec.r_max, spec.nodes);
  }
  return RadialGrid::geometric_first_step(0.0, spec.r_max, spec.nodes, spec.h0);
}

RadialLaplacian::RadialLaplacian(RadialGrid grid) : grid_(std::move(grid)) {
  const std::size_t n = grid_.size();
  if (grid_.r_min() != 0.0) raise(ErrorCode::domain_error, "wave grid must start at r = 0");
  volume_.assign(n, 0.0);
  conductance_.assign(n - 1, 0.0);
  double m_prev = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = grid_[i + 1] - grid_[i];
    const double m = 0.5 * (grid_[i] + grid_[i + 1]);
    conductance_[i] = m * m * m / h;
    volume_[i] = 0.25 * (m * m * m * m - m_prev * m_prev * m_prev * m_prev);
    m_prev = m;
  }
}

void RadialLaplacian::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = volume_.size();
  double flux_in = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double flux_out = conductance_[i] * (u[i + 1] - u[i]);
    out[i] = (flux_out - flux_in) / volume_[i];
    flux_in = flux_out;
  }
  out[n - 1] = 0.0;
}

double RadialLaplacian::mass(std::span<const double> f) const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < volume_.size(); ++i) s += volume_[i] * f[i];
  return s;
}

double RadialLaplacian::gradient_energy(std::span<const double> u) const {
  double s = 0.0;
  const std::size_t faces = std::min(conductance_.size(), u.size() - 1);
  for (std::size_t i = 0; i < faces; ++i) {
    const double d = u[i + 1] - u[i];
    s += conductance_[i] * d * d;
  }
  return 0.5 * s;
}

WaveSolver::WaveSolver(WaveState state, TimeScheme scheme, bool nonlinear)
    : state_(std::move(state)), scheme_(scheme), nonlinear_(nonlinear), lap_(state_.grid),
      min_spacing_(state_.grid.min_spacing()) {
  const std::size_t n = state_.grid.size();
  if (state_.u.size() != n || state_.ut.size() != n) raise(ErrorCode::domain_error, "wave state size mismatch");
  state_.ut[n - 1] = 0.0;
  for (auto& k : k_) k.assign(n, 0.0);
  tmp_u_.assign(n, 0.0);
  tmp_v_.assign(n, 0.0);
}

void WaveSolver::acceleration(std::span<const double> u, std::span<double> out) const {
  lap_.apply(u, out);
  if (!nonlinear_) return;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) out[i] += u[i] * u[i] * u[i];
}

void WaveSolver::step(double dt) {
  if (!(dt > 0.0) || dt > state_.cfl * min_spacing_ * (1.0 + 1e-12)) {
    raise(ErrorCode::cfl_violation, "dt = " + std::to_string(dt) + " exceeds cfl * min spacing = " +
                                        std::to_string(state_.cfl * min_spacing_));
  }
  auto& u = state_.u;
  auto& v = state_.ut;
  const std::size_t n = u.size();
  if (scheme_ == TimeScheme::leapfrog) {
    auto& a = k_[0];
    acceleration(u, a);
    for (std::size_t i = 0; i < n; ++i) v[i] += 0.5 * dt * a[i];
    for (std::size_t i = 0; i < n; ++i) u[i] += dt * v[i];
    acceleration(u, a);
    for (std::size_t i = 0; i < n; ++i) v[i] += 0.5 * dt * a[i];
  } else {
    // k_[2j] holds the u-slope and k_[2j+1] the v-slope of stage j.
    auto stage = [&](int j, double c) {
      if (j == 0) {
        k_[0] = v;
        acceleration(u, k_[1]);
        return;
      }
      const auto& ku = k_[2 * (j - 1)];
      const auto& kv = k_[2 * (j - 1) + 1];
      for (std::size_t i = 0; i < n; ++i) {
        tmp_u_[i] = u[i] + c * dt * ku[i];
        tmp_v_[i] = v[i] + c * dt * kv[i];
      }
      k_[2 * j] = tmp_v_;
      acceleration(tmp_u_, k_[2 * j + 1]);
    };
    stage(0, 0.0);
    stage(1, 0.5);
    stage(2, 0.5);
    stage(3, 1.0);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += w * (k_[0][i] + 2.0 * k_[2][i] + 2.0 * k_[4][i] + k_[6][i]);
      v[i] += w * (k_[1][i] + 2.0 * k_[3][i] + 2.0 * k_[5][i] + k_[7][i]);
    }
  }
  state_.t += dt;
  double probe = 0.0;
  for (std::size_t i = 0; i < n; ++i) probe += std::abs(u[i]) + std::abs(v[i]);
  if (!std::isfinite(probe)) {
    raise(ErrorCode::non_finite_state, "non-finite wave state at t = " + std::to_string(state_.t));
  }
}

void WaveSolver::advance(double dt, std::size_t steps) {
  for (std::size_t k = 0; k < steps; ++k) step(dt);
}

double WaveSolver::energy() const {
  const auto& u = state_.u;
  const auto& v = state_.ut;
  const auto w = lap_.volumes();
  double kin = 0.0, quart = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    kin += w[i] * v[i] * v[i];
    const double u2 = u[i] * u[i];
    quart += w[i] * u2 * u2;
  }
  return 0.5 * kin + lap_.gradient_energy(u) - (nonlinear_ ? 0.25 * quart : 0.0);
}

InitResult init_data(const InitialData& data, const ModulationContext& ctx, const WaveGridSpec& spec,
                     double t_run, double cfl) {
  const double b0 = data.b0;
  if (!(b0 >= 1e-3 && b0 <= 5e-2)) {
    raise(ErrorCode::domain_error, "b0 must lie in [1e-3, 5e-2], got " + std::to_string(b0));
  }
  if (std::abs(b0 - ctx.b0()) > 1e-14 * b0) raise(ErrorCode::domain_error, "modulation context built for another b0");
  const Scales sc(b0);
  if (spec.r_max < 2.0 * sc.B1 + t_run) {
    raise(ErrorCode::grid_too_short, "r_max = " + std::to_string(spec.r_max) + " < 2 B1 + T = " +
                                         std::to_string(2.0 * sc.B1 + t_run));
  }
  InitResult out{WaveState{wave_grid(spec), {}, {}, 0.0, cfl}, 0.0};
  auto& st = out.state;
  const std::size_t n = st.grid.size();
  st.u.resize(n);
  st.ut.resize(n);
  const auto& pb = ctx.initial_profile();
  const auto& psi = ctx.psi().psi;
  const double psi_end = psi.grid.r_max();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = st.grid[i];
    const double P = pb.P(r);
    double u0 = P;
    if (r <= psi_end) u0 += data.d_plus * psi(r);
    if (data.eta0) u0 += data.eta0(r);
    double u1 = b0 * (P + r * pb.P.derivative(r));
    if (data.eta1) u1 += data.eta1(r);
    st.u[i] = u0;
    st.ut[i] = u1;
  }
  out.kappa_plus_intended = 0.5 * data.d_plus * ctx.psi_norm2() * (1.0 + b0 / std::sqrt(ctx.zeta()));
  return out;
}

namespace {

double max_relative_energy_drift(WaveSolver& solver, std::size_t steps) {
  const double e0 = solver.energy();
  const double dt = solver.default_dt();
  double worst = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    solver.step(dt);
    worst = std::max(worst, std::abs(solver.energy() - e0) / std::abs(e0));
  }
  return worst;
}

}  // namespace

HygieneReport solver_hygiene(const HygieneOptions& opt) {
  HygieneReport rep;
  for (const std::size_t n : opt.drift_nodes) {
    const RadialGrid g = wave_grid({n, 80.0 / static_cast<double>(n), opt.drift_r_max});
    WaveState st{g, std::vector<double>(n), std::vector<double>(n, 0.0), 0.0, opt.cfl};
    for (std::size_t i = 0; i < n; ++i) st.u[i] = ground_Q(g[i]);
    WaveSolver solver(st);
    std::vector<double> lq(n);
    solver.laplacian().apply(st.u, lq);
    double trunc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) trunc = std::max(trunc, std::abs(lq[i] + std::pow(st.u[i], 3)));
    const double dt0 = solver.default_dt();
    const auto steps = static_cast<std::size_t>(std::ceil(opt.drift_time / dt0));
    solver.advance(opt.drift_time / static_cast<double>(steps), steps);
    double drift = 0.0;
    for (std::size_t i = 0; i < n; ++i) drift = std::max(drift, std::abs(solver.state().u[i] - st.u[i]));
    rep.drift.push_back(drift);
    rep.truncation.push_back(trunc);
  }
  rep.drift_bounded = !rep.drift.empty();
  for (std::size_t k = 0; k < rep.drift.size(); ++k) {
    if (rep.drift[k] > 0.5 * rep.truncation[k] * opt.drift_time * opt.drift_time) rep.drift_bounded = false;
    if (k + 1 < rep.drift.size()) {
      rep.drift_ratio.push_back(rep.drift[k] / rep.drift[k + 1]);
      if (rep.drift_ratio.back() < 3.0) rep.drift_bounded = false;
    }
  }

  {
    const RadialGrid g = wave_grid({4000, 0.01, 400.0});
    std::vector<double> u(g.size()), ut(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = 1e-3 * std::exp(-(g[i] - 5.0) * (g[i] - 5.0));
    WaveSolver rk(WaveState{g, u, ut, 0.0, opt.cfl}, TimeScheme::rk4);
    rep.energy_drift_rk4 = max_relative_energy_drift(rk, opt.energy_steps);
    WaveSolver lf(WaveState{g, u, ut, 0.0, opt.cfl}, TimeScheme::leapfrog);
    rep.energy_drift_leapfrog = max_relative_energy_drift(lf, opt.energy_steps);
  }

  {
    const double r0 = 1.0, r1 = 5.0;
    const RadialGrid g = wave_grid({8000, 0.01, 100.0});
    std::vector<double> u(g.size(), 0.0), ut(g.size(), 0.0);
    const double peak = std::exp(-4.0 / ((r1 - r0) * (r1 - r0)));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g[i];
      if (r > r0 && r < r1) u[i] = 1e-2 * std::exp(-1.0 / ((r - r0) * (r1 - r))) / peak;
    }
    WaveSolver solver(WaveState{g, u, ut, 0.0, opt.cfl});
    const double dt0 = solver.default_dt();
    const auto steps = static_cast<std::size_t>(std::ceil(opt.leak_time / dt0));
    solver.advance(opt.leak_time / static_cast<double>(steps), steps);
    for (const double margin : opt.leak_margins) {
      double leak = 0.0;
      for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        if (g[i] > r1 + opt.leak_time + margin) leak = std::max(leak, std::abs(solver.state().u[i]));
      }
      rep.leak.push_back(leak);
    }
  }
  return rep;
}

}  // namespace critwave
