#pragma once

#include <string>
#include <vector>

#include "critwave_cli/io.hpp"

namespace critwave::cli {

struct CheckResult {
  int id = 0;
  std::string name;
  std::string anchor;         // short statement of the checked relation, e.g. "pohozaev=32"
  double value = 0.0;         // headline quantity
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;          // numerical criterion and runtime limit
  bool within_runtime = true;
  double runtime_limit = 0.0; // seconds
  double seconds = 0.0;
  std::string detail;         // supporting numbers
  Json data;                  // the same numbers, structured
};

inline constexpr int check_count = 12;

// Runs acceptance criterion id (1..12). Numerical errors propagate.
CheckResult run_check(int id, unsigned workers);

// "[PASS] 01 pohozaev=32 value=... target=... tol=... (0.12 s) detail"
std::string format_check(const CheckResult& r, bool with_time = true);

// Timing-free JSON entry, stable across runs.
Json check_to_json(const CheckResult& r);

}  // namespace critwave::cli
