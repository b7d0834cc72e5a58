#include "critwave/roots.hpp"

#include <cmath>
#include <sstream>

#include "critwave/error.hpp"

namespace critwave {

RootResult find_root(const std::function<double(double)>& f, Bracket bracket, double tol,
                     RootMethod method, int max_iter) {
  double a = bracket.lo, b = bracket.hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    raise(ErrorCode::non_finite_state, "root function not finite at bracket ends");
  }
  if (fa == 0.0) return {a, 0.0, 0, {a, a}};
  if (fb == 0.0) return {b, 0.0, 0, {b, b}};
  if (std::signbit(fa) == std::signbit(fb)) {
    std::ostringstream msg;
    msg << "f(" << a << ") = " << fa << " and f(" << b << ") = " << fb << " share a sign";
    raise(ErrorCode::no_sign_change, msg.str());
  }
  int side = 0;
  for (int it = 1; it <= max_iter; ++it) {
    double c;
    if (method == RootMethod::bisection) {
      c = 0.5 * (a + b);
    } else {
      c = (a * fb - b * fa) / (fb - fa);
      if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
    }
    const double fc = f(c);
    if (!std::isfinite(fc)) raise(ErrorCode::non_finite_state, "root function not finite inside bracket");
    if (fc == 0.0) return {c, 0.0, it, {c, c}};
    if (std::signbit(fc) == std::signbit(fa)) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (std::abs(b - a) <= tol) {
      const bool left = std::abs(fa) < std::abs(fb);
      return {left ? a : b, left ? fa : fb, it, {std::min(a, b), std::max(a, b)}};
    }
  }
  raise(ErrorCode::max_iterations, "root finder did not reach tolerance");
}

}  // namespace critwave
