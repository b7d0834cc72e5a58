#include "critwave/cutoff.hpp"

namespace critwave {

Jet smoothstep_chi(double x) {
  if (x <= 1.0) return {1.0, 0.0, 0.0};
  if (x >= 2.0) return {0.0, 0.0, 0.0};
  const double t = x - 1.0;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double u = 1.0 - t;
  const double s = t4 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t3);
  return {1.0 - s, -140.0 * t3 * u * u * u, -420.0 * t2 * u * u * (1.0 - 2.0 * t)};
}

Jet Cutoff::at(double y) const {
  const Jet c = smoothstep_chi(y / B);
  return {c.f, c.d1 / B, c.d2 / (B * B)};
}

double Cutoff::operator()(double y) const { return smoothstep_chi(y / B).f; }

double Cutoff::rho(double y) const {
  const double x = y / B;
  return x * smoothstep_chi(x).d1;
}

}  // namespace critwave
