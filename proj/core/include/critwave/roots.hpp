#pragma once

#include <functional>

namespace critwave {

struct Bracket {
  double lo;
  double hi;
};

enum class RootMethod { bisection, secant };

struct RootResult {
  double root;
  double residual;
  int iterations;
  Bracket final_bracket;
};

// Bracketed scalar root finding. The secant option is the Illinois variant of
// false position, so the bracket is kept throughout.
RootResult find_root(const std::function<double(double)>& f, Bracket bracket, double tol,
                     RootMethod method = RootMethod::bisection, int max_iter = 200);

}  // namespace critwave
