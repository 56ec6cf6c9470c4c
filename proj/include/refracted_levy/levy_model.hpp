#pragma once

// Spectrally negative Levy processes of the mixed-exponential jump-diffusion
// family
//
//     X_t = c t + sigma B_t - (compound Poisson, rate eta, hyperexponential jumps)
//
// with Laplace exponent
//
//     psi(l) = c l + sigma^2 l^2 / 2 + eta (sum_i a_i r_i / (l + r_i) - 1),
//
// defined for l > -r_1. This family contains the Brownian risk model (no
// jumps) and the Cramer-Lundberg model (sigma = 0), and its scale functions
// are finite exponential sums.

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "refracted_levy/detail/bracketed_root.hpp"
#include "refracted_levy/errors.hpp"

namespace refracted_levy {

/// Default absolute distance to a pole -r_i inside which psi is refused.
inline constexpr double kPoleEpsilon = 1e-9;

/// One component of the hyperexponential claim density a r e^{-r y}.
struct JumpTerm {
  double weight = 1.0;
  double rate = 1.0;

  friend bool operator==(const JumpTerm&, const JumpTerm&) = default;
};

/// Claim arrival rate plus the mixture; `terms` is empty iff `eta` is zero.
class JumpSpec {
 public:
  JumpSpec() = default;

  JumpSpec(double eta, std::vector<JumpTerm> terms)
      : eta_(eta), terms_(std::move(terms)) {
    validate();
  }

  static JumpSpec exponential(double eta, double rate) {
    return JumpSpec(eta, {JumpTerm{1.0, rate}});
  }

  double eta() const noexcept { return eta_; }
  const std::vector<JumpTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  /// E[jump size] = sum a_i / r_i.
  double mean_jump() const noexcept {
    double m = 0.0;
    for (const auto& t : terms_) m += t.weight / t.rate;
    return m;
  }

  friend bool operator==(const JumpSpec&, const JumpSpec&) = default;

 private:
  void validate() const {
    if (!std::isfinite(eta_) || eta_ < 0.0)
      throw InputError("jump rate eta must be finite and >= 0");
    if ((eta_ == 0.0) != terms_.empty())
      throw InputError(
          "jump mixture must be empty exactly when the jump rate eta is 0");
    double total = 0.0;
    double prev_rate = 0.0;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      if (!std::isfinite(t.weight) || t.weight <= 0.0)
        throw InputError("jump mixture weight a_" + std::to_string(i + 1) +
                         " must be > 0");
      if (!std::isfinite(t.rate) || t.rate <= prev_rate)
        throw InputError(
            "jump mixture rates must be finite and strictly increasing with "
            "0 < r_1 < r_2 < ...");
      prev_rate = t.rate;
      total += t.weight;
    }
    if (!terms_.empty() &&
        std::abs(total - 1.0) > 1e-12 * static_cast<double>(terms_.size()))
      throw InputError("jump mixture weights must sum to 1");
  }

  double eta_ = 0.0;
  std::vector<JumpTerm> terms_;
};

/// A spectrally negative Levy process from the closed-form family. For
/// sigma = 0 the drift is the bounded-variation premium rate c; for sigma > 0
/// it is the linear coefficient of psi.
class LevyModel {
 public:
  LevyModel(double drift, double sigma, JumpSpec jumps = {})
      : drift_(drift), sigma_(sigma), jumps_(std::move(jumps)) {
    if (!std::isfinite(drift_)) throw InputError("drift c must be finite");
    if (!std::isfinite(sigma_) || sigma_ < 0.0)
      throw InputError("Gaussian coefficient sigma must be finite and >= 0");
    if (sigma_ == 0.0 && drift_ <= 0.0)
      throw InputError(
          "sigma = 0 requires drift c > 0 (X must not have decreasing paths)");
  }

  static LevyModel brownian(double drift, double sigma) {
    return LevyModel(drift, sigma);
  }

  static LevyModel cramer_lundberg(double premium, double eta,
                                   std::vector<JumpTerm> terms) {
    return LevyModel(premium, 0.0, JumpSpec(eta, std::move(terms)));
  }

  double drift() const noexcept { return drift_; }
  double sigma() const noexcept { return sigma_; }
  const JumpSpec& jumps() const noexcept { return jumps_; }

  bool has_jumps() const noexcept { return !jumps_.empty(); }

  /// Finite-activity jumps: bounded variation iff there is no Gaussian part.
  bool bounded_variation() const noexcept { return sigma_ == 0.0; }

  /// Smallest jump rate r_1, or +inf without jumps; psi lives on (-r_1, inf).
  double domain_left() const noexcept {
    return jumps_.empty() ? -std::numeric_limits<double>::infinity()
                          : -jumps_.terms().front().rate;
  }

  LevyModel with_drift(double drift) const {
    return LevyModel(drift, sigma_, jumps_);
  }

  friend bool operator==(const LevyModel&, const LevyModel&) = default;

 private:
  double drift_;
  double sigma_;
  JumpSpec jumps_;
};

/// X together with a refraction rate alpha and threshold b: the process U
/// solving dU = dX - alpha 1{U > b} dt. alpha = 0 is accepted as the
/// unrefracted limit.
class RefractedModel {
 public:
  RefractedModel(LevyModel x_model, double alpha, double b)
      : x_model_(std::move(x_model)), alpha_(alpha), b_(b) {
    if (!std::isfinite(alpha_) || alpha_ < 0.0)
      throw InputError("refraction rate alpha must be finite and >= 0");
    if (!std::isfinite(b_) || b_ <= 0.0)
      throw InputError("refraction threshold b must be finite and > 0");
    if (x_model_.bounded_variation() && alpha_ >= x_model_.drift()) {
      std::ostringstream msg;
      msg << "bounded-variation X requires 0 < alpha < c (refraction must not "
             "remove the whole drift); got alpha = "
          << alpha_ << ", c = " << x_model_.drift();
      throw RefractionTooLargeError(msg.str());
    }
  }

  const LevyModel& x_model() const noexcept { return x_model_; }
  double alpha() const noexcept { return alpha_; }
  double b() const noexcept { return b_; }

  RefractedModel with_alpha(double alpha) const {
    return RefractedModel(x_model_, alpha, b_);
  }
  RefractedModel with_threshold(double b) const {
    return RefractedModel(x_model_, alpha_, b);
  }

  friend bool operator==(const RefractedModel&,
                         const RefractedModel&) = default;

 private:
  LevyModel x_model_;
  double alpha_;
  double b_;
};

namespace detail {

inline void check_poles(const LevyModel& m, double lambda, double pole_eps) {
  for (const auto& t : m.jumps().terms()) {
    if (std::abs(lambda + t.rate) < pole_eps) {
      std::ostringstream msg;
      msg << "lambda = " << lambda << " lies within " << pole_eps
          << " of the pole -" << t.rate << " of the Laplace exponent";
      throw PoleProximityError(msg.str());
    }
  }
}

// Unchecked k-th derivative of psi, k in 0..3. Valid anywhere off the poles;
// used by the root finders, which need psi on the whole real line.
inline double psi_derivative_raw(const LevyModel& m, double lambda, int k) {
  const double eta = m.jumps().eta();
  const double s2 = m.sigma() * m.sigma();
  double jump_part = 0.0;
  for (const auto& t : m.jumps().terms()) {
    const double inv = 1.0 / (lambda + t.rate);
    const double ar = t.weight * t.rate;
    switch (k) {
      case 0: jump_part += ar * inv; break;
      case 1: jump_part -= ar * inv * inv; break;
      case 2: jump_part += 2.0 * ar * inv * inv * inv; break;
      default: jump_part -= 6.0 * ar * inv * inv * inv * inv; break;
    }
  }
  switch (k) {
    case 0:
      return m.drift() * lambda + 0.5 * s2 * lambda * lambda +
             (m.has_jumps() ? eta * (jump_part - 1.0) : 0.0);
    case 1: return m.drift() + s2 * lambda + eta * jump_part;
    case 2: return s2 + eta * jump_part;
    default: return eta * jump_part;
  }
}

inline double psi_raw(const LevyModel& m, double lambda) {
  return psi_derivative_raw(m, lambda, 0);
}
inline double dpsi_raw(const LevyModel& m, double lambda) {
  return psi_derivative_raw(m, lambda, 1);
}

// Minimiser of the convex exponent on (domain_left, inf). Requires that psi is
// not linear (sigma > 0 or jumps present).
inline double exponent_minimizer(const LevyModel& m) {
  const double slope0 = dpsi_raw(m, 0.0);
  if (slope0 == 0.0) return 0.0;
  auto f = [&](double l) { return dpsi_raw(m, l); };
  auto df = [&](double l) { return psi_derivative_raw(m, l, 2); };
  if (slope0 > 0.0) {
    double lo = m.domain_left();
    if (!std::isfinite(lo)) {
      // Brownian with drift: psi' = c + sigma^2 l.
      return -m.drift() / (m.sigma() * m.sigma());
    }
    return solve_bracketed(f, df, lo, 0.0, true);
  }
  double hi = 1.0;
  while (dpsi_raw(m, hi) <= 0.0) hi *= 2.0;
  return solve_bracketed(f, df, 0.0, hi, true);
}

}  // namespace detail

/// psi(lambda). Left of -r_1 this is the rational continuation of psi (where
/// the roots theta_i live). Throws PoleProximityError within `pole_eps` of
/// any pole -r_i.
inline double laplace_exponent(const LevyModel& m, double lambda,
                               double pole_eps = kPoleEpsilon) {
  detail::check_poles(m, lambda, pole_eps);
  if (lambda == 0.0) return 0.0;
  return detail::psi_raw(m, lambda);
}

/// psi'(lambda), analytic.
inline double exponent_derivative(const LevyModel& m, double lambda,
                                  double pole_eps = kPoleEpsilon) {
  detail::check_poles(m, lambda, pole_eps);
  return detail::dpsi_raw(m, lambda);
}

inline double exponent_second_derivative(const LevyModel& m, double lambda,
                                         double pole_eps = kPoleEpsilon) {
  detail::check_poles(m, lambda, pole_eps);
  return detail::psi_derivative_raw(m, lambda, 2);
}

inline double exponent_third_derivative(const LevyModel& m, double lambda,
                                        double pole_eps = kPoleEpsilon) {
  detail::check_poles(m, lambda, pole_eps);
  return detail::psi_derivative_raw(m, lambda, 3);
}

/// E[X_1] = psi'(0+) = c - eta sum a_i / r_i.
inline double mean_per_unit_time(const LevyModel& m) {
  return m.drift() - m.jumps().eta() * m.jumps().mean_jump();
}

/// Phi(q): the largest nonnegative root of psi(lambda) = q.
inline double right_inverse_phi(const LevyModel& m, double q) {
  if (!(q >= 0.0) || !std::isfinite(q))
    throw DomainError("right_inverse_phi requires finite q >= 0");
  const double mean = mean_per_unit_time(m);
  if (q == 0.0 && mean >= 0.0) return 0.0;

  if (!m.has_jumps()) {
    if (m.bounded_variation()) return q / m.drift();
    // sigma^2/2 l^2 + c l - q = 0; take the larger root without cancellation.
    const double s2 = m.sigma() * m.sigma();
    const double c = m.drift();
    const double disc = std::sqrt(c * c + 2.0 * s2 * q);
    if (c <= 0.0) return (-c + disc) / s2;
    return 2.0 * q / (c + disc);
  }

  double lo = 0.0;
  if (mean < 0.0) lo = detail::exponent_minimizer(m);
  double hi = std::max(1.0, 2.0 * lo);
  while (detail::psi_raw(m, hi) <= q) hi *= 2.0;
  return detail::solve_bracketed(
      [&](double l) { return detail::psi_raw(m, l) - q; },
      [&](double l) { return detail::dpsi_raw(m, l); }, lo, hi, true);
}

/// The process Y_t = X_t - alpha t: drift c - alpha, same sigma and jumps.
inline LevyModel refract(const RefractedModel& rm) {
  const auto& x = rm.x_model();
  if (x.bounded_variation() && rm.alpha() >= x.drift())
    throw RefractionTooLargeError(
        "bounded-variation X requires alpha < c to stay a valid process");
  return LevyModel(x.drift() - rm.alpha(), x.sigma(), x.jumps());
}

/// mean(X) - alpha > 0, needed by the bankruptcy and Parisian identities.
inline bool net_profit(const RefractedModel& rm) {
  return mean_per_unit_time(rm.x_model()) > rm.alpha();
}

inline void require_net_profit(const RefractedModel& rm) {
  if (!net_profit(rm)) {
    std::ostringstream msg;
    msg << "net profit condition E[X_1] > alpha violated: E[X_1] = "
        << mean_per_unit_time(rm.x_model()) << ", alpha = " << rm.alpha();
    throw NetProfitError(msg.str());
  }
}

}  // namespace refracted_levy
