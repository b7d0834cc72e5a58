#pragma once

#include <optional>
#include <string>
#include <vector>

#include "critwave_cli/io.hpp"

namespace critwave::cli {

struct TabulateOptions {
  double rmin = 0.01;
  double rmax = 50.0;
  std::size_t nodes = 5001;
  std::string out = "tabulate.csv";
};

struct ProfileCommandOptions {
  double b = 1e-2;
  double M = 20.0;
  std::size_t nodes = 4000;
  std::string out = "profile.csv";
};

struct SpectrumOptions {
  bool unit_l2 = false;
  std::string out = "spectrum.csv";
};

struct CoercivityOptions {
  std::string out = "coercivity.json";
  std::string tables;  // optional CSV of the zero-energy solutions and inversions
};

struct BlowupOptions {
  double b0 = 1e-2;
  std::string mode = "b";  // "b" or "j"
  double s_max = 1e6;
  std::size_t samples = 2000;
  std::string out = "blowup.csv";
};

struct DichotomyCommandOptions {
  double b0 = 1e-2;
  double s_max = 200.0;
  bool forcing = true;
  std::string out;  // optional JSON
};

struct SimulateOptions {
  double b0 = 0.02;
  std::string dplus = "0";  // a number, or "auto" for the bisected critical value
  double M = 20.0;
  std::size_t nodes = 8000;
  double h0 = 0.01;
  double rmax = 0.0;        // 0 means 4 B1(b0)
  double cfl = 0.5;
  std::string scheme = "rk4";
  int cadence = 10;
  double horizon = 0.0;     // s-horizon, 0 means 20 / sqrt(zeta)
  double exit_level = 2.0;
  bool kappa_correction = true;
  std::string out = "trace.csv";
};

struct ReportOptions {
  std::vector<int> only;    // empty means every criterion
  std::string out = "report.json";
};

// Each command writes its artifacts and returns a JSON summary that main
// prints on stdout. NumericalError propagates.
Json run_tabulate(const TabulateOptions& o);
Json run_profile(const ProfileCommandOptions& o);
Json run_spectrum(const SpectrumOptions& o);
Json run_coercivity_command(const CoercivityOptions& o, unsigned workers);
Json run_blowup(const BlowupOptions& o);
Json run_dichotomy(const DichotomyCommandOptions& o);
Json run_simulate(const SimulateOptions& o, unsigned workers);
// Prints one ledger line per criterion to stdout as it completes.
Json run_report(const ReportOptions& o, unsigned workers);

}  // namespace critwave::cli
