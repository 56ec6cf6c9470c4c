#pragma once

// q-scale functions W^(q), Z^(q) of a mixed-exponential jump-diffusion.
//
// 1/(psi(l) - q) is rational, so it splits into partial fractions over the
// real roots theta_1 > theta_2 > ... of psi(l) = q:
//
//     1/(psi(l) - q) = sum_i 1 / (psi'(theta_i) (l - theta_i)),
//
// and inverting term by term gives W^(q)(x) = sum_i e^{theta_i x} / psi'(theta_i)
// on x >= 0. Everything downstream (derivatives, antiderivatives, Laplace
// tails, convolutions) works on that exponential sum.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "refracted_levy/detail/bracketed_root.hpp"
#include "refracted_levy/errors.hpp"
#include "refracted_levy/levy_model.hpp"

namespace refracted_levy {

/// coef * exp(rate * x)
struct ExpTerm {
  double coef = 0.0;
  double rate = 0.0;
};

namespace detail {

// expm1(z)/z, continuous at 0.
inline double exprel(double z) {
  if (std::abs(z) < 1e-8) return 1.0 + 0.5 * z;
  return std::expm1(z) / z;
}

}  // namespace detail

/// sum_i coef_i e^{rate_i x} + linear * x + constant, evaluated as is (no
/// extension rule for x < 0; owners apply that).
class ExponentialSum {
 public:
  ExponentialSum() = default;
  explicit ExponentialSum(std::vector<ExpTerm> terms, double constant = 0.0,
                          double linear = 0.0)
      : terms_(std::move(terms)), constant_(constant), linear_(linear) {}

  const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
  double constant() const noexcept { return constant_; }
  double linear() const noexcept { return linear_; }

  double value(double x) const {
    double s = constant_ + linear_ * x;
    for (const auto& t : terms_) s += t.coef * std::exp(t.rate * x);
    return s;
  }

  double derivative(double x) const {
    double s = linear_;
    for (const auto& t : terms_) s += t.coef * t.rate * std::exp(t.rate * x);
    return s;
  }

  /// int_0^x value(y) dy, using expm1 so zero and tiny rates stay exact.
  double integral_from_zero(double x) const {
    double s = constant_ * x + 0.5 * linear_ * x * x;
    for (const auto& t : terms_) s += t.coef * x * detail::exprel(t.rate * x);
    return s;
  }

  /// int_from^inf e^{-decay y} value(y) dy; requires decay above every rate.
  double discounted_tail(double decay, double from) const {
    double s = 0.0;
    if (constant_ != 0.0 || linear_ != 0.0) {
      if (decay <= 0.0)
        throw DomainError("discounted tail diverges: decay must be > 0");
      const double e = std::exp(-decay * from);
      s += constant_ * e / decay;
      s += linear_ * e * (from / decay + 1.0 / (decay * decay));
    }
    for (const auto& t : terms_) {
      if (t.coef == 0.0) continue;
      if (!(decay > t.rate))
        throw DomainError(
            "discounted tail diverges: decay must exceed every exponent");
      s += t.coef * std::exp((t.rate - decay) * from) / (decay - t.rate);
    }
    return s;
  }

 private:
  std::vector<ExpTerm> terms_;
  double constant_ = 0.0;
  double linear_ = 0.0;
};

/// Real roots of psi(l) = q in decreasing order with partial-fraction weights
/// 1/psi'(theta_i).
struct RootSet {
  double q = 0.0;
  std::vector<double> roots;
  std::vector<double> weights;
  /// Conditioning notes, e.g. near-double roots with tiny |psi'(theta_i)|.
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return roots.size(); }
};

namespace detail {

struct RootSearch {
  std::vector<double> roots;  // excludes a double root at 0
  bool double_zero = false;
};

inline bool critical_mean(const LevyModel& m) {
  const double scale = std::abs(m.drift()) + m.jumps().eta() * m.jumps().mean_jump();
  return std::abs(mean_per_unit_time(m)) <=
         64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
}

inline RootSearch find_scale_roots(const LevyModel& m, double q) {
  RootSearch out;
  const bool critical = (q == 0.0) && critical_mean(m);
  auto f = [&](double l) { return psi_raw(m, l) - q; };
  auto df = [&](double l) { return dpsi_raw(m, l); };

  if (!m.has_jumps()) {
    if (m.bounded_variation()) {
      out.roots.push_back(q / m.drift());
      return out;
    }
    const double s2 = m.sigma() * m.sigma();
    const double c = m.drift();
    if (critical) {
      out.double_zero = true;
      return out;
    }
    if (q == 0.0) {
      out.roots = {std::max(0.0, -2.0 * c / s2), std::min(0.0, -2.0 * c / s2)};
      return out;
    }
    // Product of roots is -2q/s2; compute the large-magnitude one directly.
    const double disc = std::sqrt(c * c + 2.0 * s2 * q);
    if (c >= 0.0) {
      const double r2 = (-c - disc) / s2;
      out.roots = {-2.0 * q / (s2 * r2), r2};
    } else {
      const double r1 = (-c + disc) / s2;
      out.roots = {r1, -2.0 * q / (s2 * r1)};
    }
    return out;
  }

  const auto& terms = m.jumps().terms();
  const double left = -terms.front().rate;

  // Rightmost branch (-r_1, inf): psi is convex there with two roots.
  if (critical) {
    out.double_zero = true;
  } else {
    const double lmin = exponent_minimizer(m);
    auto upper_root = [&](double lo) {
      double hi = std::max(1.0, 2.0 * std::abs(lo));
      while (f(hi) <= 0.0) hi *= 2.0;
      return solve_bracketed(f, df, lo, hi, true);
    };
    if (q == 0.0) {
      if (mean_per_unit_time(m) > 0.0) {
        out.roots.push_back(0.0);
        out.roots.push_back(solve_bracketed(f, df, left, lmin, false));
      } else {
        out.roots.push_back(upper_root(lmin));
        out.roots.push_back(0.0);
      }
    } else {
      out.roots.push_back(upper_root(std::max(lmin, 0.0)));
      out.roots.push_back(solve_bracketed(f, df, left, std::min(lmin, 0.0), false));
    }
  }

  // One root between consecutive poles: +inf at -r_{k+1}+, -inf at -r_k-.
  for (std::size_t k = 0; k + 1 < terms.size(); ++k) {
    out.roots.push_back(
        solve_bracketed(f, df, -terms[k + 1].rate, -terms[k].rate, false));
  }

  // With a Gaussian part, psi -> +inf as l -> -inf: one more root left of -r_n.
  if (!m.bounded_variation()) {
    const double pole = -terms.back().rate;
    double offset = 1.0;
    while (f(pole - offset) <= 0.0) offset *= 2.0;
    out.roots.push_back(solve_bracketed(f, df, pole - offset, pole, false));
  }

  std::sort(out.roots.begin(), out.roots.end(), std::greater<>());
  return out;
}

inline std::vector<std::string> conditioning_warnings(
    const std::vector<double>& roots, const std::vector<double>& slopes) {
  std::vector<std::string> w;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (std::abs(slopes[i]) < 1e-8) {
      std::ostringstream msg;
      msg << "ill-conditioned partial fraction: |psi'(theta_" << i + 1
          << ")| = " << std::abs(slopes[i]) << " at theta = " << roots[i];
      w.push_back(msg.str());
    }
  }
  return w;
}

}  // namespace detail

/// All real roots of psi(l) = q with weights 1/psi'(theta_i): n + 2 roots when
/// sigma > 0, n + 1 when sigma = 0 (n = number of jump terms).
inline RootSet scale_roots(const LevyModel& m, double q) {
  if (!(q >= 0.0) || !std::isfinite(q))
    throw DomainError("scale roots require finite q >= 0");
  auto search = detail::find_scale_roots(m, q);
  if (search.double_zero)
    throw DegenerateRootError(
        "q = 0 with psi'(0+) = 0: psi(l) - q has a double root at 0, no simple "
        "partial-fraction expansion");
  RootSet rs;
  rs.q = q;
  rs.roots = std::move(search.roots);
  std::vector<double> slopes;
  for (double r : rs.roots) {
    slopes.push_back(detail::dpsi_raw(m, r));
    rs.weights.push_back(1.0 / slopes.back());
  }
  rs.warnings = detail::conditioning_warnings(rs.roots, slopes);
  return rs;
}

/// W^(q) and Z^(q) of one process at one rate q, precomputed as an exponential
/// sum. Immutable; safe to share across threads.
///
/// The critical case q = 0, psi'(0+) = 0 (excluded from the simple expansion)
/// is still representable: the double pole at 0 contributes A x + B with
/// A = 2/psi''(0), B = -2 psi'''(0) / (3 psi''(0)^2).
class ScaleFunction {
 public:
  ScaleFunction(const LevyModel& m, double q)
      : q_(q), at_zero_(m.sigma() > 0.0 ? 0.0 : 1.0 / m.drift()) {
    if (!(q >= 0.0) || !std::isfinite(q))
      throw DomainError("scale functions require finite q >= 0");
    auto search = detail::find_scale_roots(m, q);
    std::vector<ExpTerm> terms;
    std::vector<double> slopes;
    for (double r : search.roots) {
      slopes.push_back(detail::dpsi_raw(m, r));
      terms.push_back({1.0 / slopes.back(), r});
    }
    double constant = 0.0;
    double linear = 0.0;
    if (search.double_zero) {
      const double d2 = detail::psi_derivative_raw(m, 0.0, 2);
      const double d3 = detail::psi_derivative_raw(m, 0.0, 3);
      linear = 2.0 / d2;
      constant = -2.0 * d3 / (3.0 * d2 * d2);
    } else {
      RootSet rs;
      rs.q = q;
      rs.roots = search.roots;
      for (const auto& t : terms) rs.weights.push_back(t.coef);
      rs.warnings = detail::conditioning_warnings(rs.roots, slopes);
      roots_ = std::move(rs);
    }
    sum_ = ExponentialSum(std::move(terms), constant, linear);
  }

  double q() const noexcept { return q_; }

  /// Empty in the critical double-root case.
  const std::optional<RootSet>& roots() const noexcept { return roots_; }
  const ExponentialSum& exponential_sum() const noexcept { return sum_; }

  /// W^(q)(x); zero for x < 0. The sum cancels near 0 when sigma > 0, so
  /// the exact value is used at 0 and rounding below zero is clipped.
  double w(double x) const {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return at_zero_;
    return std::max(0.0, sum_.value(x));
  }

  /// Right derivative of W^(q); zero for x < 0.
  double w_prime(double x) const { return x < 0.0 ? 0.0 : sum_.derivative(x); }

  /// int_0^x W^(q)(y) dy; zero for x <= 0.
  double w_integral(double x) const {
    return x <= 0.0 ? 0.0 : sum_.integral_from_zero(x);
  }

  /// Z^(q)(x) = 1 + q int_0^x W^(q); one for x <= 0.
  double z(double x) const {
    if (x <= 0.0 || q_ == 0.0) return 1.0;
    return 1.0 + q_ * sum_.integral_from_zero(x);
  }

  /// W^(q)(0+): 1/c for bounded variation, 0 otherwise.
  double w_at_zero() const noexcept { return at_zero_; }

  /// int_from^inf e^{-decay y} W^(q)(y) dy for from >= 0.
  double discounted_tail(double decay, double from) const {
    return sum_.discounted_tail(decay, std::max(from, 0.0));
  }

  /// Z^(q) as q sum_i e^{theta_i x} / (psi'(theta_i) theta_i); q > 0 only.
  ExponentialSum z_exponential_sum() const {
    if (q_ <= 0.0)
      throw DomainError("Z^(q) has no pure exponential form at q = 0");
    std::vector<ExpTerm> t;
    for (const auto& term : sum_.terms())
      t.push_back({q_ * term.coef / term.rate, term.rate});
    return ExponentialSum(std::move(t));
  }

 private:
  double q_;
  double at_zero_;
  std::optional<RootSet> roots_;
  ExponentialSum sum_;
};

inline double scale_w(const LevyModel& m, double q, double x) {
  return ScaleFunction(m, q).w(x);
}

inline double scale_w_prime(const LevyModel& m, double q, double x) {
  return ScaleFunction(m, q).w_prime(x);
}

inline double scale_z(const LevyModel& m, double q, double x) {
  return ScaleFunction(m, q).z(x);
}

inline double scale_w_integral(const LevyModel& m, double q, double x) {
  return ScaleFunction(m, q).w_integral(x);
}

/// lim_{x -> inf} W(x) = 1/psi'(0+) for a process drifting to +inf.
inline double scale_w_at_infinity(const LevyModel& m) {
  const double mean = mean_per_unit_time(m);
  if (!(mean > 0.0)) {
    std::ostringstream msg;
    msg << "W(x) is unbounded unless psi'(0+) > 0; got " << mean;
    throw DomainError(msg.str());
  }
  return 1.0 / mean;
}

}  // namespace refracted_levy
