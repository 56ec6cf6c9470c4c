#pragma once

// Reference computations used only by the tests. None of them call into the
// scale-function or root-finding code under test.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "refracted_levy/levy_model.hpp"

namespace oracle {

/// psi written out from the model parameters.
inline double psi(const refracted_levy::LevyModel& m, double lambda) {
  double v = m.drift() * lambda + 0.5 * m.sigma() * m.sigma() * lambda * lambda;
  if (m.has_jumps()) {
    double s = 0.0;
    for (const auto& t : m.jumps().terms()) s += t.weight * t.rate / (lambda + t.rate);
    v += m.jumps().eta() * (s - 1.0);
  }
  return v;
}

/// int_0^inf e^{-lambda y} f(y) dy by exp-sinh quadrature.
inline double laplace_transform(const std::function<double(double)>& f, double lambda) {
  boost::math::quadrature::exp_sinh<double> integrator;
  // Far out e^{-lambda y} underflows while f may overflow; the product is
  // negligible there because the transform converges.
  return integrator.integrate(
      [&](double y) {
        const double e = std::exp(-lambda * y);
        if (e == 0.0) return 0.0;
        const double v = e * f(y);
        return std::isfinite(v) ? v : 0.0;
      },
      1e-13);
}

/// int_0^inf f by exp-sinh quadrature.
inline double half_line(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 1e-13);
}

/// int_a^b f by tanh-sinh quadrature (handles endpoint singularities).
inline double finite(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, 1e-13);
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Five-point central difference.
inline double derivative(const std::function<double(double)>& f, double x,
                         double h = 1e-3) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

/// All sign changes of g on a uniform scan of [lo, hi], refined by bisection.
/// Intervals containing a pole are skipped via `skip`.
inline std::vector<double> scan_roots(const std::function<double(double)>& g, double lo,
                                      double hi, int n,
                                      const std::function<bool(double, double)>& skip) {
  std::vector<double> out;
  const double h = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    double a = lo + i * h, b = a + h;
    if (skip(a, b)) continue;
    double ga = g(a), gb = g(b);
    if (ga == 0.0) {
      out.push_back(a);
      continue;
    }
    if (ga * gb > 0.0) continue;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (a + b);
      const double gm = g(mid);
      if ((gm < 0.0) == (ga < 0.0)) {
        a = mid;
        ga = gm;
      } else {
        b = mid;
      }
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

}  // namespace oracle
