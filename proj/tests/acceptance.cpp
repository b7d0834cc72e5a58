#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "critwave_cli/checks.hpp"
#include "critwave_cli/io.hpp"

// Usage: critwave_acceptance [id ...]; no ids runs every criterion.
// Prints one line per criterion; exits 1 if any fails.
int main(int argc, char** argv) {
  namespace cw = critwave::cli;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int i = 1; i <= cw::check_count; ++i) ids.push_back(i);
  }
  const unsigned workers = cw::worker_count();
  bool all = true;
  for (const int id : ids) {
    try {
      const auto r = cw::run_check(id, workers);
      std::cout << cw::format_check(r) << std::endl;
      all = all && r.pass;
    } catch (const std::exception& e) {
      std::cout << "[FAIL] " << (id < 10 ? "0" : "") << id << " error: " << e.what() << std::endl;
      all = false;
    }
  }
  return all ? 0 : 1;
}
