#include <algorithm>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "critwave/error.hpp"
#include "critwave_cli/commands.hpp"
#include "critwave_cli/io.hpp"

namespace cw = critwave::cli;

namespace {

std::string config_path;

CLI::App* command(CLI::App& app, const char* name, const char* help) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("--config", config_path, "key=value file; command-line flags take precedence");
  return sub;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Splices "--key=value" pairs from the file named by --config in front of the
// command-line flags, skipping keys that are also given as flags. Unknown keys
// then fail parsing like unknown flags.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.size() < 2) return args;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read config file " + path);
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> spliced;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--config", "expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (!given(key)) spliced.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  args.insert(args.begin() + 2, spliced.begin(), spliced.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critwave: blow-up dynamics of the energy-critical focusing wave equation in R^4"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "critwave 0.1.0");

  const CLI::Range positive(1e-300, 1e300);

  cw::TabulateOptions tab;
  auto* c_tab = command(app, "tabulate", "Tabulate Q, Lambda Q, Phi, V, W and Gamma to CSV");
  c_tab->add_option("--rmin", tab.rmin, "first node (> 0)")->check(positive)->capture_default_str();
  c_tab->add_option("--rmax", tab.rmax, "last node")->check(positive)->capture_default_str();
  c_tab->add_option("--nodes", tab.nodes, "uniform nodes")->check(CLI::Range(2, 10'000'000))->capture_default_str();
  c_tab->add_option("--out", tab.out, "CSV path")->capture_default_str();

  cw::ProfileCommandOptions prof;
  auto* c_prof = command(app, "profile", "Assemble P_B1, Psi_B1 and dP/db for one b");
  c_prof->add_option("--b", prof.b, "scale parameter in (0, 0.2]")->check(CLI::Range(1e-12, 0.2))->capture_default_str();
  c_prof->add_option("--M", prof.M, "localization radius")->check(CLI::Range(1.0, 1e3))->capture_default_str();
  c_prof->add_option("--nodes", prof.nodes, "profile grid nodes")->check(CLI::Range(100, 10'000'000))->capture_default_str();
  c_prof->add_option("--out", prof.out, "CSV path; the JSON header goes next to it")->capture_default_str();

  cw::SpectrumOptions spec;
  auto* c_spec = command(app, "spectrum", "Bound state (zeta, psi) of H by shooting");
  c_spec->add_flag("--unit-l2", spec.unit_l2, "normalize psi in L2 instead of psi(0) = 1");
  c_spec->add_option("--out", spec.out, "CSV path; the JSON summary goes next to it")->capture_default_str();

  cw::CoercivityOptions coer;
  auto* c_coer = command(app, "coercivity", "Index counts, Gram matrix of B^-1 and Hardy constants");
  c_coer->add_option("--out", coer.out, "JSON path")->capture_default_str();
  c_coer->add_option("--tables", coer.tables, "optional CSV of U, U~, B^-1 psi, B^-1 Phi");

  cw::BlowupOptions blow;
  auto* c_blow = command(app, "blowup", "Integrate the reduced (b, lambda) system");
  c_blow->add_option("--b0", blow.b0, "initial b in (0, 0.2]")->check(CLI::Range(1e-12, 0.2))->capture_default_str();
  c_blow->add_option("--mode", blow.mode, "b: b-ode, j: J-ode")->check(CLI::IsMember({"b", "j"}))->capture_default_str();
  c_blow->add_option("--s-max", blow.s_max, "final s")->check(CLI::Range(2.0, 1e300))->capture_default_str();
  c_blow->add_option("--samples", blow.samples, "log-spaced samples")->check(CLI::Range(2, 10'000'000))->capture_default_str();
  c_blow->add_option("--out", blow.out, "CSV path; the JSON summary goes next to it")->capture_default_str();

  cw::DichotomyCommandOptions dich;
  auto* c_dich = command(app, "dichotomy", "Exit-sign bisection on the forced (kappa_+, kappa_-) model");
  c_dich->add_option("--b0", dich.b0, "initial b in (0, 0.2]")->check(CLI::Range(1e-12, 0.2))->capture_default_str();
  c_dich->add_option("--s-max", dich.s_max, "horizon in s")->check(positive)->capture_default_str();
  c_dich->add_option("--forcing", dich.forcing, "include the forcing terms")->capture_default_str();
  c_dich->add_option("--out", dich.out, "optional JSON path");

  cw::SimulateOptions sim;
  auto* c_sim = command(app, "simulate", "Wave equation run from the modulated profile with live extraction");
  c_sim->add_option("--b0", sim.b0, "initial b in [1e-3, 5e-2]")->check(CLI::Range(1e-3, 5e-2))->capture_default_str();
  c_sim->add_option("--dplus", sim.dplus, "psi amplitude, or 'auto' to bisect for the critical value")
      ->capture_default_str();
  c_sim->add_option("--M", sim.M, "localization radius")->check(CLI::Range(1.0, 1e3))->capture_default_str();
  c_sim->add_option("--nodes", sim.nodes, "grid nodes")->check(CLI::Range(16, 10'000'000))->capture_default_str();
  c_sim->add_option("--h0", sim.h0, "first grid spacing")->check(positive)->capture_default_str();
  c_sim->add_option("--rmax", sim.rmax, "outer radius, 0 means 4 B1(b0)")->check(CLI::Range(0.0, 1e300))->capture_default_str();
  c_sim->add_option("--cfl", sim.cfl, "dt / min spacing")->check(CLI::Range(1e-6, 0.99))->capture_default_str();
  c_sim->add_option("--scheme", sim.scheme, "rk4 or leapfrog")->check(CLI::IsMember({"rk4", "leapfrog"}))->capture_default_str();
  c_sim->add_option("--cadence", sim.cadence, "steps between extractions")->check(CLI::Range(1, 1'000'000))->capture_default_str();
  c_sim->add_option("--horizon", sim.horizon, "s-horizon, 0 means 20/sqrt(zeta)")->check(CLI::Range(0.0, 1e300))->capture_default_str();
  c_sim->add_option("--exit-level", sim.exit_level, "exit when |kappa_+| |log b| / b^2 reaches this")
      ->check(positive)->capture_default_str();
  c_sim->add_option("--kappa-correction", sim.kappa_correction, "include b_s (d_b P, psi) in kappa_pm")
      ->capture_default_str();
  c_sim->add_option("--out", sim.out, "trace CSV path; the JSON summary goes next to it")->capture_default_str();

  cw::ReportOptions rep;
  auto* c_rep = command(app, "report", "Run the acceptance checks and write the pass/fail ledger");
  c_rep->add_option("--only", rep.only, "criterion ids to run (default all)")->check(CLI::Range(1, 12));
  c_rep->add_option("--out", rep.out, "ledger JSON path")->capture_default_str();

  try {
    auto args = expand_config(argc, argv);
    std::vector<char*> ptrs;
    for (auto& a : args) ptrs.push_back(a.data());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "critwave: " << e.what() << "\n";
    return 2;
  }

  const unsigned workers = cw::worker_count();
  try {
    cw::Json out;
    if (*c_tab) out = cw::run_tabulate(tab);
    else if (*c_prof) out = cw::run_profile(prof);
    else if (*c_spec) out = cw::run_spectrum(spec);
    else if (*c_coer) out = cw::run_coercivity_command(coer, workers);
    else if (*c_blow) out = cw::run_blowup(blow);
    else if (*c_dich) out = cw::run_dichotomy(dich);
    else if (*c_sim) out = cw::run_simulate(sim, workers);
    else if (*c_rep) out = cw::run_report(rep, workers);
    std::cout << cw::render_json(out);
  } catch (const critwave::NumericalError& e) {
    std::cerr << "critwave: " << e.what() << "\n";
    return e.code() == critwave::ErrorCode::domain_error ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "critwave: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
