#pragma once

// Refracted scale functions and exit identities for U, the solution of
// dU = dX - alpha 1{U > b} dt. Throughout, W/Z belong to X and the
// "refracted-drift" functions WY/ZY belong to Y = X - alpha t:
//
//   w(x;a) = W(x-a) + alpha 1{x >= b} int_b^x WY(x-y) W'(y-a) dy
//   z(x;a) = Z(x-a) + alpha q 1{x >= b} int_b^x WY(x-y) W(y-a) dy

#include <cmath>
#include <sstream>

#include "refracted_levy/errors.hpp"
#include "refracted_levy/levy_model.hpp"
#include "refracted_levy/quadrature.hpp"
#include "refracted_levy/scale_function.hpp"

namespace refracted_levy {

namespace detail {

inline void require_ordered(double a, double x, double c, const char* what) {
  if (!(a <= x && x <= c)) {
    std::ostringstream msg;
    msg << what << ": levels must satisfy a <= x <= c; got a = " << a
        << ", x = " << x << ", c = " << c;
    throw OrderingError(msg.str());
  }
}

// int_b^x f(x-y) g(y-a) dy for pure exponential sums f, g, termwise.
inline double exponential_convolution(const ExponentialSum& f,
                                      const ExponentialSum& g, double a,
                                      double b, double x) {
  if (f.constant() != 0.0 || f.linear() != 0.0 || g.constant() != 0.0 ||
      g.linear() != 0.0)
    throw DomainError(
        "closed-form convolution needs pure exponential sums (no critical "
        "double root)");
  const double len = x - b;
  if (len <= 0.0) return 0.0;
  double s = 0.0;
  for (const auto& fi : f.terms())
    for (const auto& gj : g.terms())
      s += fi.coef * gj.coef * std::exp(fi.rate * len + gj.rate * (b - a)) *
           len * exprel((gj.rate - fi.rate) * len);
  return s;
}

inline ExponentialSum derivative_sum(const ExponentialSum& s) {
  if (s.linear() != 0.0)
    throw DomainError("closed-form derivative needs a pure exponential sum");
  std::vector<ExpTerm> t;
  for (const auto& term : s.terms()) t.push_back({term.coef * term.rate, term.rate});
  return ExponentialSum(std::move(t));
}

}  // namespace detail

/// w^(q)(.;a) and z^(q)(.;a) for one refracted model, rate q and lower level
/// a <= b. Holds the scale functions of X and Y at rate q; read-only after
/// construction.
class RefractedScaleEval {
 public:
  RefractedScaleEval(const RefractedModel& rm, double q, double a,
                     QuadratureOptions opts = {})
      : model_(rm),
        q_(q),
        a_(a),
        opts_(opts),
        x_scale_(rm.x_model(), q),
        y_scale_(refract(rm), q) {
    if (!(a <= rm.b())) {
      std::ostringstream msg;
      msg << "refracted scale functions need a <= b; got a = " << a
          << ", b = " << rm.b();
      throw OrderingError(msg.str());
    }
  }

  const RefractedModel& model() const noexcept { return model_; }
  double q() const noexcept { return q_; }
  double a() const noexcept { return a_; }
  const QuadratureOptions& quadrature() const noexcept { return opts_; }
  const ScaleFunction& x_scale() const noexcept { return x_scale_; }
  const ScaleFunction& y_scale() const noexcept { return y_scale_; }

  /// w^(q)(x;a) by adaptive quadrature of the convolution on [b, x].
  double w(double x) const {
    const double base = x_scale_.w(x - a_);
    const double b = model_.b();
    if (x < b || model_.alpha() == 0.0) return base;
    const double conv = integrate(
        [&](double y) { return y_scale_.w(x - y) * x_scale_.w_prime(y - a_); },
        b, x, opts_);
    return base + model_.alpha() * conv;
  }

  /// z^(q)(x;a) by adaptive quadrature.
  double z(double x) const {
    const double base = x_scale_.z(x - a_);
    const double b = model_.b();
    if (x < b || model_.alpha() == 0.0 || q_ == 0.0) return base;
    const double conv = integrate(
        [&](double y) { return y_scale_.w(x - y) * x_scale_.w(y - a_); }, b, x,
        opts_);
    return base + model_.alpha() * q_ * conv;
  }

  /// Termwise closed form of w(x;a), for cross-checking the quadrature path.
  double w_closed_form(double x) const {
    const double base = x_scale_.w(x - a_);
    if (x < model_.b()) return base;
    return base + model_.alpha() *
                      detail::exponential_convolution(
                          y_scale_.exponential_sum(),
                          detail::derivative_sum(x_scale_.exponential_sum()),
                          a_, model_.b(), x);
  }

  double z_closed_form(double x) const {
    const double base = x_scale_.z(x - a_);
    if (x < model_.b()) return base;
    return base + model_.alpha() * q_ *
                      detail::exponential_convolution(
                          y_scale_.exponential_sum(),
                          x_scale_.exponential_sum(), a_, model_.b(), x);
  }

 private:
  RefractedModel model_;
  double q_;
  double a_;
  QuadratureOptions opts_;
  ScaleFunction x_scale_;
  ScaleFunction y_scale_;
};

inline double little_w(const RefractedScaleEval& ev, double x) { return ev.w(x); }
inline double little_z(const RefractedScaleEval& ev, double x) { return ev.z(x); }

/// E_x[e^{-q tau_c^+}; tau_c^+ < tau_a^-] for X.
inline double exit_up_X(const LevyModel& m, double q, double x, double a,
                        double c) {
  detail::require_ordered(a, x, c, "exit_up_X");
  if (x == c) return 1.0;
  const ScaleFunction sf(m, q);
  return sf.w(x - a) / sf.w(c - a);
}

/// E_x[e^{-q tau_a^-}; tau_a^- < tau_c^+] for X.
inline double exit_down_X(const LevyModel& m, double q, double x, double a,
                          double c) {
  detail::require_ordered(a, x, c, "exit_down_X");
  if (x == c) return 0.0;
  const ScaleFunction sf(m, q);
  return sf.z(x - a) - sf.z(c - a) / sf.w(c - a) * sf.w(x - a);
}

namespace detail {

inline void require_refracted_levels(const RefractedModel& rm, double x,
                                     double a, double c, const char* what) {
  require_ordered(a, x, c, what);
  if (!(a <= rm.b() && rm.b() <= c)) {
    std::ostringstream msg;
    msg << what << ": threshold must satisfy a <= b <= c; got a = " << a
        << ", b = " << rm.b() << ", c = " << c;
    throw OrderingError(msg.str());
  }
}

}  // namespace detail

/// E_x[e^{-q kappa_c^+}; kappa_c^+ < kappa_a^-] = w(x;a)/w(c;a).
inline double exit_up_U(const RefractedModel& rm, double q, double x, double a,
                        double c, const QuadratureOptions& opts = {}) {
  detail::require_refracted_levels(rm, x, a, c, "exit_up_U");
  if (x == c) return 1.0;
  const RefractedScaleEval ev(rm, q, a, opts);
  return ev.w(x) / ev.w(c);
}

/// E_x[e^{-q kappa_a^-}; kappa_a^- < kappa_c^+] = z(x;a) - z(c;a) w(x;a)/w(c;a).
inline double exit_down_U(const RefractedModel& rm, double q, double x,
                          double a, double c,
                          const QuadratureOptions& opts = {}) {
  detail::require_refracted_levels(rm, x, a, c, "exit_down_U");
  if (x == c) return 0.0;
  const RefractedScaleEval ev(rm, q, a, opts);
  return ev.z(x) - ev.z(c) / ev.w(c) * ev.w(x);
}

/// Classical ruin probability of X: 1 - (E[X_1] v 0) W(x).
inline double ruin_prob_X(const LevyModel& m, double x) {
  const double mean = mean_per_unit_time(m);
  if (x < 0.0 || !(mean > 0.0)) return 1.0;
  return 1.0 - mean * ScaleFunction(m, 0.0).w(x);
}

/// Ruin probability of U: 1 - (E[X_1] - alpha) w^(0)(x;0) / (1 - alpha W(b)).
inline double ruin_prob_U(const RefractedModel& rm, double x,
                          const QuadratureOptions& opts = {}) {
  require_net_profit(rm);
  if (x < 0.0) return 1.0;
  const RefractedScaleEval ev(rm, 0.0, 0.0, opts);
  const double mean = mean_per_unit_time(rm.x_model());
  const double denom = 1.0 - rm.alpha() * ev.x_scale().w(rm.b());
  return 1.0 - (mean - rm.alpha()) / denom * ev.w(x);
}

/// |LHS - RHS| of the mixed convolution identity
///   (q-p) int_0^x WY^(p)(x-y) W^(q)(y) dy
///     = W^(q)(x) - WY^(p)(x)
///       + alpha (W^(q)(0) WY^(p)(x) + int_0^x WY^(p)(x-y) W^(q)'(y) dy).
inline double convolution_identity_residual(const RefractedModel& rm, double p,
                                            double q, double x,
                                            const QuadratureOptions& opts = {}) {
  if (!(p >= 0.0 && q >= 0.0 && x >= 0.0))
    throw DomainError("convolution identity needs p, q, x >= 0");
  const ScaleFunction wq(rm.x_model(), q);
  const ScaleFunction wyp(refract(rm), p);
  const double lhs =
      (q - p) *
      integrate([&](double y) { return wyp.w(x - y) * wq.w(y); }, 0.0, x, opts);
  const double conv_prime =
      integrate([&](double y) { return wyp.w(x - y) * wq.w_prime(y); }, 0.0, x,
                opts);
  const double rhs = wq.w(x) - wyp.w(x) +
                     rm.alpha() * (wq.w_at_zero() * wyp.w(x) + conv_prime);
  return std::abs(lhs - rhs);
}

/// |w^(q)(x;0) - ((1 - alpha W^(q)(0)) WY^(q)(x) - alpha int_0^b WY^(q)(x-y) W^(q)'(y) dy)|
/// for x > b.
inline double rep_wq_residual(const RefractedModel& rm, double q, double x,
                              const QuadratureOptions& opts = {}) {
  if (!(x > rm.b()))
    throw DomainError("alternative representation of w^(q) needs x > b");
  const RefractedScaleEval ev(rm, q, 0.0, opts);
  const auto& wx = ev.x_scale();
  const auto& wy = ev.y_scale();
  const double alt =
      (1.0 - rm.alpha() * wx.w_at_zero()) * wy.w(x) -
      rm.alpha() * integrate([&](double y) { return wy.w(x - y) * wx.w_prime(y); },
                             0.0, rm.b(), opts);
  return std::abs(ev.w(x) - alt);
}

}  // namespace refracted_levy
