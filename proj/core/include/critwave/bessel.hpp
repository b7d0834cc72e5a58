#pragma once

namespace critwave {

struct BesselValues {
  double j0, j1, y0, y1;
  double dj1, dy1;  // derivatives of J1 and Y1
};

// Ascending series, accurate to ~1e-12 absolute for 0 < x <= 12.
BesselValues bessel_values(double x);

struct BesselPair {
  double j1, y1;
};
BesselPair bessel_J1_Y1(double x);

}  // namespace critwave
