#include "critwave_cli/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <iostream>

#include "critwave/blowup_law.hpp"
#include "critwave/coercivity.hpp"
#include "critwave/cutoff.hpp"
#include "critwave/error.hpp"
#include "critwave/groundstate.hpp"
#include "critwave/profile.hpp"
#include "critwave/spectral.hpp"
#include "critwave/wave_sim.hpp"
#include "critwave_cli/checks.hpp"

namespace critwave::cli {

namespace {

Json exit_record(const ExitRecord& e) {
  return {{"sign", e.sign}, {"s_exit", e.s_exit}, {"b_exit", e.b_exit}, {"max_kappa_minus", e.max_kappa_minus}};
}

Json index_json(const IndexReport& r) {
  return {{"zero_count", r.zero_count},         {"zeros", r.zeros},
          {"tail_value", r.tail_value},         {"bessel_zero_count", r.bessel_zero_count},
          {"K", r.K},                           {"K_half", r.K_half},
          {"K_exact", r.K_exact},               {"K_nonzero", r.K_nonzero},
          {"zeros_in_r", r.zeros_in_r}};
}

Json inversion_json(const Inversion& v) {
  return {{"origin_value", v.origin_value}, {"tail_coefficient", v.tail_coefficient},
          {"flatness", v.flatness},         {"corrected_flatness", v.corrected_flatness},
          {"residual", v.residual}};
}

CsvTable trace_table(const ModulationTrace& tr) {
  CsvTable t;
  t.add("t", tr.t);
  t.add("s", tr.s);
  t.add("lambda", tr.lambda);
  t.add("b", tr.b);
  t.add("b_s", tr.b_s);
  t.add("kappa_plus", tr.kappa_plus);
  t.add("kappa_minus", tr.kappa_minus);
  t.add("calE", tr.calE);
  t.add("energy", tr.energy);
  t.add("constraint", tr.constraint);
  t.add("minus_lambda_t", tr.lambda_t);
  t.add("kappa_plus_uncorrected", tr.kappa_plus_uncorrected);
  return t;
}

}  // namespace

Json run_tabulate(const TabulateOptions& o) {
  const auto grid = RadialGrid::uniform(o.rmin, o.rmax, o.nodes);
  const auto gamma = compute_gamma(grid);
  CsvTable t;
  std::vector<double> y(grid.size()), Q(y.size()), LQ(y.size()), Phi(y.size()), V(y.size()), W(y.size()),
      G(y.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto v = eval_ground_family(grid[i]);
    y[i] = grid[i];
    Q[i] = v.Q.f;
    LQ[i] = v.LQ.f;
    Phi[i] = v.Phi.f;
    V[i] = v.V.f;
    W[i] = v.W.f;
    G[i] = gamma.gamma.value[i];
  }
  t.add("y", y);
  t.add("Q", Q);
  t.add("LambdaQ", LQ);
  t.add("Phi", Phi);
  t.add("V", V);
  t.add("W", W);
  t.add("Gamma", G);
  write_csv(o.out, t);
  return {{"command", "tabulate"}, {"out", o.out}, {"rows", grid.size()},
          {"wronskian_drift", gamma.wronskian_drift}};
}

Json run_profile(const ProfileCommandOptions& o) {
  ProfileOptions po;
  po.M = o.M;
  po.nodes = o.nodes;
  const auto pb = assemble_PB1(o.b, po);
  const auto& g = pb.grid;
  const Cutoff chi{pb.B0 / 4.0};
  const std::size_t n = g.size();
  std::vector<double> y(n), T1(n), P(n), Psi(n), dP(n), rem(n), eT(n), eD(n), eP(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = g[i];
    y[i] = r;
    T1[i] = pb.T1.value[i];
    P[i] = pb.P.value[i];
    Psi[i] = pb.Psi.value[i];
    dP[i] = pb.dP_db ? pb.dP_db->value[i] : 0.0;
    rem[i] = Psi[i] - pb.cb * o.b * o.b * chi(r) * lambda_Q(r);
    eT[i] = envelope_T1(r, o.b, o.M);
    eD[i] = envelope_dP(r, o.b, o.M);
    eP[i] = envelope_Psi(r, o.b, o.M);
  }
  CsvTable t;
  t.add("y", y);
  t.add("T1", T1);
  t.add("P_B1", P);
  t.add("Psi_B1", Psi);
  t.add("dP_db", dP);
  t.add("Psi_remainder", rem);
  t.add("envelope_T1", eT);
  t.add("envelope_dP", eD);
  t.add("envelope_Psi", eP);
  write_csv(o.out, t);

  const std::array<double, 4> probes{5.0, pb.B0 / 4.0, pb.B0, 1.5 * pb.B1};
  double kT = 0.0, kD = 0.0, kP = 0.0;
  for (const double r : probes) {
    kT = std::max(kT, std::abs(pb.T1(r)) / envelope_T1(r, o.b, o.M));
    if (pb.dP_db && envelope_dP(r, o.b, o.M) > 0.0) {
      kD = std::max(kD, std::abs((*pb.dP_db)(r)) / envelope_dP(r, o.b, o.M));
    }
    kP = std::max(kP, std::abs(pb.Psi(r) - pb.cb * o.b * o.b * chi(r) * lambda_Q(r)) / envelope_Psi(r, o.b, o.M));
  }
  const auto fl = flux_integral(pb);
  Json head = {{"command", "profile"},
               {"b", pb.b},
               {"B0", pb.B0},
               {"B1", pb.B1},
               {"M", pb.M},
               {"c_b", pb.cb},
               {"c_b_normalized", pb.cb_detail.normalized},
               {"c", pb.c},
               {"dc_db", pb.dc_db},
               {"orthogonality", pb.orthogonality},
               {"probes", probes},
               {"fitted_T1", kT},
               {"fitted_dP", kD},
               {"fitted_Psi", kP},
               {"flux_ratio", fl.ratio},
               {"out", o.out}};
  write_json(sidecar_json(o.out), head);
  return head;
}

Json run_spectrum(const SpectrumOptions& o) {
  EigenOptions eo;
  eo.normalization = o.unit_l2 ? Normalization::unit_l2 : Normalization::origin_value;
  const auto e = solve_eigenpair({0.3, 0.9}, nullptr, eo);
  const auto& g = e.psi.grid;
  const double k = std::sqrt(e.zeta);
  std::vector<double> r(g.size()), psi(g.size()), env(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    r[i] = g[i];
    psi[i] = e.psi.value[i];
    env[i] = psi[i] * std::exp(k * r[i]);
  }
  CsvTable t;
  t.add("r", r);
  t.add("psi", psi);
  t.add("psi_exp_sqrt_zeta_r", env);
  write_csv(o.out, t);
  Json head = {{"command", "spectrum"},
               {"zeta", e.zeta},
               {"normalization", o.unit_l2 ? "unit_l2" : "origin_value"},
               {"scale", e.scale},
               {"eigen_residual", e.eigen_residual},
               {"lq_overlap", e.lq_overlap},
               {"log_derivative_mismatch", e.log_derivative_mismatch},
               {"decay_slope", e.decay_slope},
               {"bare_decay_slope", e.bare_decay_slope},
               {"instability_radius", e.instability_radius},
               {"out", o.out}};
  write_json(sidecar_json(o.out), head);
  return head;
}

Json run_coercivity_command(const CoercivityOptions& o, unsigned workers) {
  const auto rep = run_coercivity(workers);
  const auto h = hardy_spot_check();
  const auto& g = rep.gram;
  Json doc = {{"command", "coercivity"},
              {"zeta", rep.psi.zeta},
              {"index_W", index_json(rep.index_W)},
              {"index_W_hat", index_json(rep.index_W_hat)},
              {"index_bessel", index_json(rep.index_bessel)},
              {"inverse_psi", inversion_json(rep.inv_psi)},
              {"inverse_phi", inversion_json(rep.inv_phi)},
              {"gram",
               {{"psi_psi", g.psi_psi},
                {"phi_psi", g.phi_psi},
                {"psi_phi", g.psi_phi},
                {"phi_phi", g.phi_phi},
                {"phi_phi_raw", g.phi_phi_raw},
                {"det", g.det},
                {"K_tail", g.K_tail},
                {"K_richardson", g.K_richardson},
                {"K_exact", g.K_exact},
                {"invariant_ratio", g.invariant_ratio},
                {"symmetry_defect", g.symmetry_defect},
                {"negative_definite", g.negative_definite()}}},
              {"hardy",
               {{"samples", h.samples},
                {"hardy0", h.hardy0},
                {"hardy_h2", h.hardy_h2},
                {"hardy_log", h.hardy_log},
                {"hardy_nolog", h.hardy_nolog},
                {"identity_constant", h.identity_constant},
                {"identity_defect", h.identity_defect},
                {"scale_variation", h.scale_variation},
                {"scale_variation_fixed_radius", h.scale_variation_log},
                {"subcoercivity_c", h.subcoercivity_c},
                {"all_finite", h.all_finite}}}};
  write_json(o.out, doc);
  if (!o.tables.empty()) {
    const auto grid = RadialGrid::uniform(0.0, 250.0, 1001);
    const auto uw = zero_energy_solution(grid, IndexPotential::W);
    const auto uh = zero_energy_solution(grid, IndexPotential::W_hat);
    const auto& bs = rep.index_bessel;
    std::vector<double> r(grid.size()), c1(r.size()), c2(r.size()), c3(r.size()), c4(r.size()), c5(r.size()),
        c6(r.size()), c7(r.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i];
      r[i] = x;
      c1[i] = uw.value[i];
      c2[i] = uh.value[i];
      c3[i] = bessel_reduced_solution(1.0 / std::sqrt(1.0 + x * x / 8.0), bs.C1, bs.C2);
      c4[i] = rep.inv_psi.U(x);
      c5[i] = x * x * c4[i];
      c6[i] = rep.inv_phi.U(x);
      c7[i] = x > 0.0 ? x * x * c6[i] + 192.0 * std::log(x) : 0.0;
    }
    CsvTable t;
    t.add("r", r);
    t.add("U_W", c1);
    t.add("U_W_hat", c2);
    t.add("U_tilde", c3);
    t.add("Binv_psi", c4);
    t.add("Binv_psi_tail", c5);
    t.add("Binv_phi", c6);
    t.add("Binv_phi_tail", c7);
    write_csv(o.tables, t);
    doc["tables"] = o.tables;
  }
  doc["out"] = o.out;
  return doc;
}

Json run_blowup(const BlowupOptions& o) {
  ReducedOptions ro;
  ro.s_max = o.s_max;
  ro.samples = o.samples;
  const auto mode = o.mode == "j" ? ReducedMode::J_ode : ReducedMode::b_ode;
  const auto tr = integrate_reduced_system(o.b0, mode, ro);
  const std::size_t n = tr.s.size();
  std::vector<double> lam(n), bl(n), ll(n);
  for (std::size_t i = 0; i < n; ++i) {
    lam[i] = std::exp(tr.log_lambda[i]);
    const double ls = std::log(tr.s[i]);
    bl[i] = tr.s[i] > 1.0 ? tr.b[i] * tr.s[i] / (2.0 * ls) : std::nan("");
    ll[i] = tr.s[i] > 1.0 ? -tr.log_lambda[i] / (ls * ls) : std::nan("");
  }
  CsvTable t;
  t.add("s", tr.s);
  t.add("t", tr.t);
  t.add("b", tr.b);
  t.add("lambda", lam);
  t.add("J", tr.J.size() == n ? tr.J : std::vector<double>(n, std::nan("")));
  t.add("T_minus_t", tr.T_minus_t);
  t.add("b_law", bl);
  t.add("lambda_law", ll);
  write_csv(o.out, t);
  Json head = {{"command", "blowup"},
               {"b0", o.b0},
               {"mode", o.mode},
               {"T", tr.T},
               {"termination", tr.termination == Termination::s_max ? "s_max" : "floor_reached"},
               {"b_law_ratio", tr.b_law_ratio},
               {"lambda_law_ratio", tr.lambda_law_ratio},
               {"lambda_fit_slope", tr.lambda_fit_slope},
               {"speed_law_ratio", tr.speed_law_ratio},
               {"scaling_bound", tr.scaling_bound},
               {"time_consistency", tr.time_consistency},
               {"out", o.out}};
  write_json(sidecar_json(o.out), head);
  return head;
}

Json run_dichotomy(const DichotomyCommandOptions& o) {
  DichotomyOptions d;
  d.s_max = o.s_max;
  d.forcing_on = o.forcing;
  const auto r = dichotomy_demo(o.b0, d);
  Json doc = {{"command", "dichotomy"},
              {"b0", r.b0},
              {"a_star", r.a_star},
              {"a_star_duhamel", r.a_star_duhamel},
              {"scaled_a_star", r.scaled_a_star},
              {"bracket_width", r.bracket_width},
              {"bisection_steps", r.bisection_steps},
              {"predicted_exit", r.predicted_exit},
              {"at_star", exit_record(r.at_star)},
              {"above", exit_record(r.above)},
              {"below", exit_record(r.below)}};
  if (!o.out.empty()) {
    write_json(o.out, doc);
    doc["out"] = o.out;
  }
  return doc;
}

Json run_simulate(const SimulateOptions& o, unsigned workers) {
  ModulationContext::Options co;
  co.M = o.M;
  co.workers = workers;
  const ModulationContext ctx(o.b0, co);
  SimulationOptions so;
  so.grid = {o.nodes, o.h0, o.rmax};
  so.cfl = o.cfl;
  so.scheme = o.scheme == "leapfrog" ? TimeScheme::leapfrog : TimeScheme::rk4;
  so.cadence = o.cadence;
  so.s_horizon = o.horizon;
  so.exit_level = o.exit_level;
  so.kappa_correction = o.kappa_correction;
  so.diagnostics = true;
  InitialData data;
  data.b0 = o.b0;

  Json head = {{"command", "simulate"}, {"b0", o.b0}, {"M", o.M}, {"nodes", o.nodes}, {"h0", o.h0},
               {"cfl", o.cfl},          {"scheme", o.scheme}, {"cadence", o.cadence},
               {"kappa_correction", o.kappa_correction}};
  ModulationTrace tr;
  if (o.dplus == "auto") {
    BisectOptions bo;
    bo.sim = so;
    bo.workers = workers;
    const auto res = run_and_bisect(ctx, bo, data);
    tr = res.critical;
    const auto& e = res.envelopes;
    head["bisection"] = {{"d_star", res.d_star},
                         {"bracket_width", res.bracket_width},
                         {"rounds", res.rounds},
                         {"monotone", res.monotone},
                         {"sweep_d", res.sweep_d},
                         {"sweep_sign", res.sweep_sign},
                         {"exit_above", res.above.exit_sign},
                         {"exit_below", res.below.exit_sign},
                         {"rate_above", res.growth_above.rate},
                         {"rate_below", res.growth_below.rate},
                         {"K_bs", e.K_bs},
                         {"K_calE", e.K_calE},
                         {"K_kappa_minus", e.K_kappa_minus},
                         {"K_kappa_plus", e.K_kappa_plus},
                         {"kappa_correction_shift", res.kappa_correction_shift}};
  } else {
    char* end = nullptr;
    data.d_plus = std::strtod(o.dplus.c_str(), &end);
    if (end == o.dplus.c_str() || *end != '\0' || !std::isfinite(data.d_plus)) {
      raise(ErrorCode::domain_error, "--dplus must be a number or 'auto', got '" + o.dplus + "'");
    }
    tr = run_trajectory(data, ctx, so);
  }
  write_csv(o.out, trace_table(tr));
  head["d_plus"] = tr.d_plus;
  head["kappa_plus_intended"] = tr.kappa_plus_intended;
  head["exit_sign"] = tr.exit_sign;
  head["s_exit"] = tr.s_exit;
  head["extractions"] = tr.t.size();
  head["out"] = o.out;
  write_json(sidecar_json(o.out), head);
  return head;
}

Json run_report(const ReportOptions& o, unsigned workers) {
  std::vector<int> ids = o.only;
  if (ids.empty()) {
    for (int i = 1; i <= check_count; ++i) ids.push_back(i);
  }
  Json entries = Json::array();
  bool all = true;
  for (const int id : ids) {
    const auto r = run_check(id, workers);
    std::cout << format_check(r) << std::endl;
    entries.push_back(check_to_json(r));
    all = all && r.pass;
  }
  Json doc = {{"command", "report"}, {"overall_pass", all}, {"entries", entries}};
  write_json(o.out, doc);
  return {{"command", "report"}, {"overall_pass", all}, {"checks", ids.size()}, {"out", o.out}};
}

}  // namespace critwave::cli
