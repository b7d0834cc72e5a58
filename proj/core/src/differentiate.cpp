#include "critwave/differentiate.hpp"

#include <algorithm>
#include <array>

#include "critwave/error.hpp"

namespace critwave {

std::vector<double> fornberg_weights(double x0, std::span<const double> xs, int m) {
  const int n = static_cast<int>(xs.size()) - 1;
  if (m > n) raise(ErrorCode::domain_error, "stencil too small for derivative order");
  // c[j][k]: weight of node j for derivative k.
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n + 1), std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n + 1));
  for (int j = 0; j <= n; ++j) w[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
  return w;
}

Derivatives fd_derivatives(const RadialGrid& grid, std::span<const double> f, bool even_origin) {
  const std::size_t n = grid.size();
  if (f.size() != n) raise(ErrorCode::domain_error, "values do not match grid");
  const bool reflect = even_origin && grid[0] == 0.0;
  Derivatives out{std::vector<double>(n), std::vector<double>(n)};
  std::array<double, 5> xs{}, fs{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<long>(i);
    long start = ii - 2;
    if (!reflect) start = std::clamp(start, 0L, static_cast<long>(n) - 5);
    else start = std::min(start, static_cast<long>(n) - 5);
    for (int k = 0; k < 5; ++k) {
      const long j = start + k;
      if (j < 0) {
        xs[static_cast<std::size_t>(k)] = -grid[static_cast<std::size_t>(-j)];
        fs[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(-j)];
      } else {
        xs[static_cast<std::size_t>(k)] = grid[static_cast<std::size_t>(j)];
        fs[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(j)];
      }
    }
    const auto w1 = fornberg_weights(grid[i], xs, 1);
    const auto w2 = fornberg_weights(grid[i], xs, 2);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      d1 += w1[k] * fs[k];
      d2 += w2[k] * fs[k];
    }
    out.d1[i] = d1;
    out.d2[i] = d2;
  }
  return out;
}

}  // namespace critwave
