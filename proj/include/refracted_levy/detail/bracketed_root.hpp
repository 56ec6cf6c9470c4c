#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace refracted_levy::detail {

// Safeguarded Newton iteration on an open bracket (lo, hi) known to contain
// exactly one sign change of f. The endpoints are never evaluated, so they
// may sit on poles or at +-infinity-like values. `increasing` states the sign
// pattern: f < 0 near lo and f > 0 near hi when true.
template <class F, class DF>
double solve_bracketed(F&& f, DF&& df, double lo, double hi, bool increasing,
                       int max_iter = 400) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double x = 0.5 * (lo + hi);
  double prev_width = hi - lo;
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (fx == 0.0 || !std::isfinite(fx)) return x;
    if ((fx < 0.0) == increasing) {
      lo = x;
    } else {
      hi = x;
    }
    const double width = hi - lo;
    if (width <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) ||
        width <= std::numeric_limits<double>::min()) {
      return x;
    }
    const double slope = df(x);
    double next = x - fx / slope;
    const bool newton_ok = std::isfinite(next) && next > lo && next < hi &&
                           width <= 0.5 * prev_width;
    if (newton_ok && std::abs(next - x) <= 2.0 * eps * std::abs(x)) {
      return next;
    }
    if (!newton_ok) next = 0.5 * (lo + hi);
    prev_width = width;
    x = next;
  }
  return x;
}

}  // namespace refracted_levy::detail
