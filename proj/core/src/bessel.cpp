#include "critwave/bessel.hpp"

#include <cmath>
#include <numbers>

#include "critwave/error.hpp"

namespace critwave {

BesselValues bessel_values(double x) {
  if (!(x > 0.0)) raise(ErrorCode::domain_error, "Bessel evaluation needs x > 0");
  if (x > 12.0) raise(ErrorCode::domain_error, "Bessel series used outside x <= 12");
  constexpr double pi = std::numbers::pi;
  constexpr double gamma = std::numbers::egamma;
  const double q = -0.25 * x * x;
  const double hx = 0.5 * x;

  // term0_k = q^k/(k!)^2 and term1_k = q^k/(k!(k+1)!); harmonic H_k.
  double t0 = 1.0, t1 = 1.0, h = 0.0;
  double j0 = 0.0, j1s = 0.0, y0s = 0.0, y1s = 0.0;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      t0 *= q / (static_cast<double>(k) * k);
      t1 *= q / (static_cast<double>(k) * (k + 1));
      h += 1.0 / k;
    }
    j0 += t0;
    j1s += t1;
    y0s += h * t0;
    // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    y1s += (-2.0 * gamma + 2.0 * h + 1.0 / (k + 1)) * t1;
    if (k > 4 && std::abs(t0) < 1e-17 && std::abs(t1) < 1e-17) break;
  }
  const double j1 = hx * j1s;
  const double lg = std::log(hx);
  const double y0 = 2.0 / pi * ((lg + gamma) * j0 - y0s);
  const double y1 = -2.0 / (pi * x) + 2.0 / pi * lg * j1 - hx / pi * y1s;
  return {j0, j1, y0, y1, j0 - j1 / x, y0 - y1 / x};
}

BesselPair bessel_J1_Y1(double x) {
  const auto v = bessel_values(x);
  return {v.j1, v.y1};
}

}  // namespace critwave
