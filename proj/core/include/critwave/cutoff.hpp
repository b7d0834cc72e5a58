#pragma once

#include "critwave/groundstate.hpp"

namespace critwave {

// chi(x) = 1 on [0,1], 1 - S7(x - 1) on [1,2], 0 beyond, with the septic
// smoothstep S7(t) = 35t^4 - 84t^5 + 70t^6 - 20t^7 (C^3 at both seams).
Jet smoothstep_chi(double x);

// chi_B(y) = chi(y/B) with y-derivatives.
struct Cutoff {
  double B = 1.0;
  Jet at(double y) const;
  double operator()(double y) const;
  // rho(y/B) = (y/B) chi'(y/B)
  double rho(double y) const;
};

}  // namespace critwave
