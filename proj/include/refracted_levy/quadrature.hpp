#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "refracted_levy/errors.hpp"

namespace refracted_levy {

/// Acceptance thresholds for adaptive Gauss-Kronrod integration. An interval
/// passes when its error estimate is below max(abs_tol, rel_tol * L1).
struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  unsigned max_depth = 18;

  friend bool operator==(const QuadratureOptions&,
                         const QuadratureOptions&) = default;
};

/// Adaptive G7-K15 integral of f over [lo, hi]. The integrand is split at
/// every breakpoint strictly inside (lo, hi), so kinks and jumps there do not
/// slow the refinement down. Throws QuadratureError when the estimate does
/// not meet the tolerance.
template <class F>
double integrate(F&& f, double lo, double hi, const QuadratureOptions& opts = {},
                 std::initializer_list<double> breakpoints = {}) {
  if (hi == lo) return 0.0;
  if (hi < lo) return -integrate(f, hi, lo, opts, breakpoints);

  std::vector<double> cuts{lo};
  for (double p : breakpoints)
    if (p > lo && p < hi) cuts.push_back(p);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] == cuts[i]) continue;
    // Each piece is mapped onto [-1, 1]: the error estimate of the library
    // routine has an absolute floor that would swamp very short intervals.
    const double half = 0.5 * (cuts[i + 1] - cuts[i]);
    const double mid = cuts[i] + half;
    auto mapped = [&](double u) { return f(mid + half * u); };
    double err = 0.0;
    double l1 = 0.0;
    double piece = GK::integrate(mapped, -1.0, 1.0, opts.max_depth, opts.rel_tol,
                                 &err, &l1);
    piece *= half;
    err *= half;
    l1 *= half;
    if (!std::isfinite(piece) ||
        err > std::max(opts.abs_tol, opts.rel_tol * l1)) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge on [" << cuts[i] << ", "
          << cuts[i + 1] << "]: value " << piece << ", error estimate " << err;
      throw QuadratureError(msg.str());
    }
    total += piece;
  }
  return total;
}

}  // namespace refracted_levy
