#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/differentiation/autodiff.hpp>

#include "critwave/coercivity.hpp"
#include "critwave/groundstate.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {

namespace {

namespace ad = boost::math::differentiation;
using F = ad::autodiff_fvar<double, 2>;
using TestFunction = std::function<F(const F&)>;

F bump(const F& y, double a, double b) {
  const double yv = static_cast<double>(y);
  if (yv <= a || yv >= b) return F(0.0);
  return exp(-1.0 / ((y - a) * (b - y)));
}

std::vector<TestFunction> test_family() {
  std::vector<TestFunction> fam;
  for (double a : {0.05, 0.25, 1.0, 4.0}) fam.push_back([a](const F& y) { return exp(-a * y * y); });
  fam.push_back([](const F& y) { return y * y * exp(-y * y); });
  fam.push_back([](const F& y) { return y * y * y * y * exp(-0.5 * y * y); });
  fam.push_back([](const F& y) {
    const F y2 = y * y;
    return y2 * y2 * y2 * exp(-y2);
  });
  for (int k : {2, 3, 4}) fam.push_back([k](const F& y) { return pow(1.0 + y * y, -k); });
  fam.push_back([](const F& y) { return bump(y, 1.0, 2.0); });
  fam.push_back([](const F& y) { return bump(y, 0.5, 3.0); });
  for (double k : {2.0, 5.0}) fam.push_back([k](const F& y) { return cos(k * y) * exp(-y * y); });
  fam.push_back([](const F& y) { return 1.0 / (1.0 + y * y / 8.0); });
  fam.push_back([](const F& y) {
    const F t = y * y / 8.0;
    return (1.0 - t) / ((1.0 + t) * (1.0 + t));
  });
  fam.push_back([](const F& y) {
    const F e = exp(-y);
    return 2.0 * e / (1.0 + e * e);
  });
  fam.push_back([](const F& y) { return exp(-y * y * y * y); });
  fam.push_back([](const F& y) { return (1.0 - y * y) * exp(-y * y); });
  fam.push_back([](const F& y) { return exp(-y * y) + 0.5 * bump(y, 2.0, 4.0); });
  return fam;
}

struct Sample {
  double v, d1, d2;
};

Sample evaluate(const TestFunction& f, double y, double lambda) {
  const auto out = f(ad::make_fvar<double, 2>(y / lambda));
  return {out.derivative(0), out.derivative(1) / lambda, out.derivative(2) / (lambda * lambda)};
}

// Integrals in x = log y, where y^3 dy = y^4 dx.
class LogIntegrator {
 public:
  LogIntegrator() : gl_(20) {}
  double operator()(const std::function<double(double)>& g, double y0, double y1) const {
    const double x0 = std::log(y0), x1 = std::log(y1);
    const int panels = std::max(1, static_cast<int>(std::ceil((x1 - x0) / 0.04)));
    double s = 0.0;
    const double w = (x1 - x0) / panels;
    for (int p = 0; p < panels; ++p) {
      s += gl_.integrate([&](double x) { return g(std::exp(x)); }, x0 + p * w, x0 + (p + 1) * w);
    }
    return s;
  }

 private:
  GaussLegendre gl_;
};

struct Measures {
  double hardy0, h2, log_ratio, nolog_ratio, identity, sub_c, sub_identity;
};

Measures measure(const TestFunction& f, double lambda, const LogIntegrator& integ) {
  constexpr double eps = 1e-10, R = 10.0;
  const double ymax = 1e4 * lambda;
  // Each integrand below is already multiplied by y^4 (the y^3 weight and dy = y dx).
  auto I = [&](auto&& g, double a, double b) {
    return integ(
        [&](double y) {
          const auto s = evaluate(f, y, lambda);
          return g(y, s);
        },
        a, b);
  };
  auto full = [&](auto&& g) { return I(g, eps, 2.0) + I(g, 2.0, R) + I(g, R, 2.0 * R) + I(g, 2.0 * R, ymax); };
  auto lap = [](double y, const Sample& s) { return s.d2 + 3.0 * s.d1 / y; };

  const double v_over_y = full([](double y, const Sample& s) { return s.v * s.v * y * y; });
  const double grad = full([](double y, const Sample& s) { return s.d1 * s.d1 * y * y * y * y; });
  const double grad_over_y = full([](double y, const Sample& s) { return s.d1 * s.d1 * y * y; });
  const double lap2 = full([&](double y, const Sample& s) {
    const double l = lap(y, s);
    return l * l * y * y * y * y;
  });
  const double d2sq = full([](double y, const Sample& s) { return s.d2 * s.d2 * y * y * y * y; });

  // sup y|v|: coarse scan in log y, then golden-section refinement.
  auto yv = [&](double x) {
    const double y = std::exp(x);
    return y * std::abs(evaluate(f, y, lambda).v);
  };
  double best_x = std::log(eps), sup = 0.0;
  for (double x = std::log(eps); x <= std::log(ymax); x += 1e-2) {
    if (const double v = yv(x); v > sup) {
      sup = v;
      best_x = x;
    }
  }
  {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_x - 1e-2, b = best_x + 1e-2;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = yv(c), fd = yv(d);
    for (int it = 0; it < 60; ++it) {
      if (fc > fd) {
        b = d, d = c, fd = fc, c = b - g * (b - a), fc = yv(c);
      } else {
        a = c, c = d, fc = fd, d = a + g * (b - a), fd = yv(d);
      }
    }
    sup = std::max({sup, fc, fd});
  }

  // int_{y <= R} v^2 / (y^4 (1 + |log y|)^2) y^3 dy, with the part below eps
  // taken from v(0)^2 int dx / (1 - x)^2.
  auto log_w = [](double y, const Sample& s) {
    const double l = 1.0 + std::abs(std::log(y));
    return s.v * s.v / (l * l);
  };
  const double v0 = evaluate(f, 0.0, lambda).v;
  const double log_num = I(log_w, eps, 2.0) + I(log_w, 2.0, R) + v0 * v0 / (1.0 - std::log(eps));
  const double grad_inner = I([](double y, const Sample& s) { return s.d1 * s.d1 * y * y; }, eps, 2.0) +
                            I([](double y, const Sample& s) { return s.d1 * s.d1 * y * y; }, 2.0, R);
  const double mass2 = I([](double y, const Sample& s) { return s.v * s.v * y * y * y * y; }, eps, 2.0);
  const double ring = I([](double, const Sample& s) { return s.v * s.v; }, R, 2.0 * R);

  // (Hu)^2 = (Lap u + V u)^2 and its expansion.
  const double hu2 = full([&](double y, const Sample& s) {
    const double h = lap(y, s) + potential_V(y) * s.v;
    return h * h * y * y * y * y;
  });
  const double expansion = full([&](double y, const Sample& s) {
    const auto gs = eval_ground_family(y);
    const double l = lap(y, s);
    const double lapV = gs.V.d2 + 3.0 * gs.V.d1 / y;
    return (l * l - 2.0 * gs.V.f * s.d1 * s.d1 + (lapV + gs.V.f * gs.V.f) * s.v * s.v) * y * y * y * y;
  });
  const double A = lap2 + full([](double y, const Sample& s) {
                     const double y2 = y * y;
                     return s.v * s.v / (1.0 + y2 * y2 * y2) * y2 * y2;
                   });
  const double B = full([](double y, const Sample& s) {
    const double y2 = y * y;
    return (s.d1 * s.d1 / (1.0 + y2 * y2) + s.v * s.v / (1.0 + y2 * y2 * y2 * y2)) * y2 * y2;
  });

  Measures m;
  m.hardy0 = (std::sqrt(v_over_y) + sup) / std::sqrt(grad);
  m.h2 = grad_over_y / lap2;
  m.log_ratio = log_num / (grad_inner + mass2);
  m.nolog_ratio = ring / (std::log(R) * grad_inner + mass2);
  m.identity = (lap2 - d2sq) / grad_over_y;
  // c A - B / c <= (Hu)^2 holds for every c up to the positive root.
  m.sub_c = (hu2 + std::sqrt(hu2 * hu2 + 4.0 * A * B)) / (2.0 * A);
  m.sub_identity = std::abs(hu2 - expansion) / lap2;
  return m;
}

double spread(const std::array<double, 3>& v) {
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  return (*mx - *mn) / std::abs((v[0] + v[1] + v[2]) / 3.0);
}

}  // namespace

HardyConstants hardy_spot_check() {
  const auto fam = test_family();
  const LogIntegrator integ;
  HardyConstants out;
  out.samples = static_cast<int>(fam.size());
  out.subcoercivity_c = INFINITY;
  out.identity_constant = 3.0;
  bool finite = true;
  for (const auto& f : fam) {
    std::array<Measures, 3> m;
    const std::array<double, 3> lambdas{0.5, 1.0, 2.0};
    for (std::size_t k = 0; k < 3; ++k) m[k] = measure(f, lambdas[k], integ);
    const auto& base = m[1];
    for (const auto& x : m) {
      for (double v : {x.hardy0, x.h2, x.log_ratio, x.nolog_ratio, x.identity, x.sub_c}) {
        finite = finite && std::isfinite(v);
      }
    }
    out.hardy0 = std::max(out.hardy0, base.hardy0);
    out.hardy_h2 = std::max(out.hardy_h2, base.h2);
    out.hardy_log = std::max(out.hardy_log, base.log_ratio);
    out.hardy_nolog = std::max(out.hardy_nolog, base.nolog_ratio);
    for (const auto& x : m) {
      const double d = std::abs(x.identity - 3.0);
      if (d > out.identity_defect) {
        out.identity_defect = d;
        out.identity_constant = x.identity;
      }
      out.subcoercivity_identity = std::max(out.subcoercivity_identity, x.sub_identity);
    }
    out.subcoercivity_c = std::min(out.subcoercivity_c, base.sub_c);
    out.scale_variation = std::max({out.scale_variation, spread({m[0].hardy0, m[1].hardy0, m[2].hardy0}),
                                    spread({m[0].h2, m[1].h2, m[2].h2})});
    out.scale_variation_log =
        std::max({out.scale_variation_log, spread({m[0].log_ratio, m[1].log_ratio, m[2].log_ratio}),
                  spread({m[0].nolog_ratio, m[1].nolog_ratio, m[2].nolog_ratio})});
  }
  out.all_finite = finite;
  return out;
}

}  // namespace critwave
