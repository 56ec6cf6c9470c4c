#pragma once

// Name -> function tables behind `rlevy eval` and `rlevy simulate`.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "refracted_levy/cli/model_spec.hpp"
#include "refracted_levy/levy_model.hpp"
#include "refracted_levy/mc_oracle.hpp"
#include "refracted_levy/occupation.hpp"
#include "refracted_levy/refracted.hpp"
#include "refracted_levy/scale_function.hpp"

namespace refracted_levy::cli {

struct OpValue {
  OpValue() = default;
  OpValue(double v) : value(v) {}  // NOLINT(google-explicit-constructor)

  double value = 0.0;
  std::optional<double> std_error;  ///< set for sampled values only
};

struct Operation {
  std::string name;
  std::vector<std::string> params;
  std::string summary;
  std::function<OpValue(const ModelSpec&, const std::vector<double>&)> fn;
};

inline const std::vector<Operation>& operations() {
  using P = std::vector<double>;
  using S = const ModelSpec&;
  static const std::vector<Operation> ops = {
      {"laplace-exponent", {"lambda"}, "psi(lambda) of X",
       [](S s, const P& v) { return OpValue{laplace_exponent(s.process, v[0])}; }},
      {"exponent-derivative", {"lambda"}, "psi'(lambda) of X",
       [](S s, const P& v) {
         return OpValue{exponent_derivative(s.process, v[0])};
       }},
      {"mean", {}, "E[X_1]",
       [](S s, const P&) { return OpValue{mean_per_unit_time(s.process)}; }},
      {"phi", {"q"}, "right inverse Phi(q) of X",
       [](S s, const P& v) { return OpValue{right_inverse_phi(s.process, v[0])}; }},
      {"phi-Y", {"q"}, "right inverse of Y = X - alpha t",
       [](S s, const P& v) {
         return OpValue{right_inverse_phi(refract(s.refracted()), v[0])};
       }},
      {"scale-W", {"q", "x"}, "W^(q)(x) of X",
       [](S s, const P& v) { return OpValue{scale_w(s.process, v[0], v[1])}; }},
      {"scale-W-prime", {"q", "x"}, "W^(q)'(x) of X (right derivative)",
       [](S s, const P& v) {
         return OpValue{scale_w_prime(s.process, v[0], v[1])};
       }},
      {"scale-Z", {"q", "x"}, "Z^(q)(x) of X",
       [](S s, const P& v) { return OpValue{scale_z(s.process, v[0], v[1])}; }},
      {"scale-W-integral", {"q", "x"}, "int_0^x W^(q)(y) dy of X",
       [](S s, const P& v) {
         return OpValue{scale_w_integral(s.process, v[0], v[1])};
       }},
      {"scale-W-infinity", {}, "lim W^(0)(x) = 1/E[X_1]",
       [](S s, const P&) { return OpValue{scale_w_at_infinity(s.process)}; }},
      {"scale-W-Y", {"q", "x"}, "W^(q)(x) of Y = X - alpha t",
       [](S s, const P& v) {
         return OpValue{scale_w(refract(s.refracted()), v[0], v[1])};
       }},
      {"scale-Z-Y", {"q", "x"}, "Z^(q)(x) of Y = X - alpha t",
       [](S s, const P& v) {
         return OpValue{scale_z(refract(s.refracted()), v[0], v[1])};
       }},
      {"little-w", {"q", "a", "x"}, "refracted w^(q)(x;a)",
       [](S s, const P& v) {
         return OpValue{
             RefractedScaleEval(s.refracted(), v[0], v[1], s.quadrature).w(v[2])};
       }},
      {"little-z", {"q", "a", "x"}, "refracted z^(q)(x;a)",
       [](S s, const P& v) {
         return OpValue{
             RefractedScaleEval(s.refracted(), v[0], v[1], s.quadrature).z(v[2])};
       }},
      {"exit-up-X", {"q", "x", "a", "c"}, "E_x[e^{-q tau_c+}; tau_c+ < tau_a-] for X",
       [](S s, const P& v) {
         return OpValue{exit_up_X(s.process, v[0], v[1], v[2], v[3])};
       }},
      {"exit-down-X", {"q", "x", "a", "c"}, "E_x[e^{-q tau_a-}; tau_a- < tau_c+] for X",
       [](S s, const P& v) {
         return OpValue{exit_down_X(s.process, v[0], v[1], v[2], v[3])};
       }},
      {"exit-up-U", {"q", "x", "a", "c"}, "E_x[e^{-q k_c+}; k_c+ < k_a-] for U",
       [](S s, const P& v) {
         return OpValue{
             exit_up_U(s.refracted(), v[0], v[1], v[2], v[3], s.quadrature)};
       }},
      {"exit-down-U", {"q", "x", "a", "c"}, "E_x[e^{-q k_a-}; k_a- < k_c+] for U",
       [](S s, const P& v) {
         return OpValue{
             exit_down_U(s.refracted(), v[0], v[1], v[2], v[3], s.quadrature)};
       }},
      {"ruin-X", {"x"}, "classical ruin probability of X",
       [](S s, const P& v) { return OpValue{ruin_prob_X(s.process, v[0])}; }},
      {"ruin-U", {"x"}, "ruin probability of U",
       [](S s, const P& v) {
         return OpValue{ruin_prob_U(s.refracted(), v[0], s.quadrature)};
       }},
      {"convolution-residual", {"p", "q", "x"},
       "residual of the mixed W/WY convolution identity",
       [](S s, const P& v) {
         return OpValue{convolution_identity_residual(s.refracted(), v[0], v[1],
                                                      v[2], s.quadrature)};
       }},
      {"rep-wq-residual", {"q", "x"},
       "residual of the alternative w^(q)(x;0) representation, x > b",
       [](S s, const P& v) {
         return OpValue{rep_wq_residual(s.refracted(), v[0], v[1], s.quadrature)};
       }},
      {"occ-exit-up", {"p", "q", "x", "a", "c"},
       "E_x[e^{-p k_c+ - q occ}; k_c+ < k_a-]",
       [](S s, const P& v) {
         return OpValue{occ_lt_exit_up({s.refracted(), v[2], v[3], v[4], v[0], v[1]},
                                       s.quadrature)};
       }},
      {"occ-exit-down", {"p", "q", "x", "a", "c"},
       "E_x[e^{-p k_a- - q occ}; k_a- < k_c+]",
       [](S s, const P& v) {
         return OpValue{occ_lt_exit_down(
             {s.refracted(), v[2], v[3], v[4], v[0], v[1]}, s.quadrature)};
       }},
      {"occ-exit-down-printed-sign", {"p", "q", "x", "a", "c"},
       "the '+' variant H(x) + H(c)/G(c) G(x), for comparison only",
       [](S s, const P& v) {
         return OpValue{occ_lt_exit_down_printed_sign(
             {s.refracted(), v[2], v[3], v[4], v[0], v[1]}, s.quadrature)};
       }},
      {"bankruptcy-ruin-lt", {"q", "x"},
       "E_x[e^{-q occ}; ruin], occupation before ruin",
       [](S s, const P& v) {
         return OpValue{
             bankruptcy_lt_ruin_finite(s.refracted(), v[1], v[0], s.quadrature)};
       }},
      {"survival-lt", {"q", "x"}, "E_x[e^{-q occ}; no ruin]",
       [](S s, const P& v) {
         return OpValue{survival_lt(s.refracted(), v[1], v[0], s.quadrature)};
       }},
      {"bankruptcy", {"q", "x"}, "bankruptcy probability, rate q on [0,b)",
       [](S s, const P& v) {
         return OpValue{prob_bankruptcy(s.refracted(), v[1], v[0], s.quadrature)};
       }},
      {"reach-up", {"q", "x", "c"}, "E_x[e^{-q occ}; k_c+ < inf]",
       [](S s, const P& v) {
         return OpValue{
             occ_lt_reach_up(s.refracted(), v[1], v[2], v[0], s.quadrature)};
       }},
      {"total-occupation-lt", {"q", "x"}, "E_x[e^{-q int_0^inf 1{U<b} ds}]",
       [](S s, const P& v) {
         return OpValue{total_occupation_lt(s.refracted(), v[1], v[0], s.quadrature)};
       }},
      {"parisian", {"q", "x"}, "Parisian ruin probability, Exp(q) clocks",
       [](S s, const P& v) {
         return OpValue{prob_parisian(s.refracted(), v[1], v[0], s.quadrature)};
       }},
      {"occupation-atom", {"x"}, "P_x(no time below b)",
       [](S s, const P& v) { return OpValue{occupation_atom(s.refracted(), v[0])}; }},
      {"occupation-density", {"x", "r"},
       "density of the total time below b at r (sampled for jump models)",
       [](S s, const P& v) {
         DensityOptions d;
         d.mc_samples = s.simulation.n_paths;
         d.seed = s.simulation.seed;
         const auto dv = occupation_density(s.refracted(), v[0], v[1], d);
         OpValue out{dv.value};
         if (dv.monte_carlo) out.std_error = dv.std_error;
         return out;
       }},
  };
  return ops;
}

inline const Operation* find_operation(const std::string& name) {
  for (const auto& op : operations())
    if (op.name == name) return &op;
  return nullptr;
}

/// One simulated quantity with the matching analytic value when one exists.
struct NamedEstimate {
  std::string quantity;
  SimEstimate estimate;
  std::optional<double> analytic;
};

struct SimTarget {
  std::string name;
  std::vector<std::string> params;
  std::string summary;
  std::function<std::vector<NamedEstimate>(const ModelSpec&, const SimConfig&,
                                           const std::vector<double>&)>
      fn;
};

namespace detail {

// Analytic values fail for models outside their domain (e.g. no net
// profit); the estimate is still reported.
template <class F>
std::optional<double> try_analytic(F&& f) {
  try {
    return f();
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline const std::vector<SimTarget>& sim_targets() {
  using P = std::vector<double>;
  using S = const ModelSpec&;
  using C = const SimConfig&;
  using V = std::vector<NamedEstimate>;
  static const std::vector<SimTarget> targets = {
      {"exit", {"q", "x", "a", "c"}, "E_x[e^{-q kappa}; up/down exit of [a,c]]",
       [](S s, C cfg, const P& v) {
         const auto rm = s.refracted();
         const auto e = estimate_exit(rm, v[0], v[1], v[2], v[3], cfg);
         return V{{"up", e.up,
                   detail::try_analytic([&] {
                     return exit_up_U(rm, v[0], v[1], v[2], v[3], s.quadrature);
                   })},
                  {"down", e.down, detail::try_analytic([&] {
                     return exit_down_U(rm, v[0], v[1], v[2], v[3], s.quadrature);
                   })}};
       }},
      {"occupation-joint", {"p", "q", "x", "a", "c"},
       "E_x[e^{-p kappa - q occ}; up/down exit of [a,c]]",
       [](S s, C cfg, const P& v) {
         const auto rm = s.refracted();
         const auto e =
             estimate_occupation_joint(rm, v[0], v[1], v[2], v[3], v[4], cfg);
         const OccupationQuery qr{rm, v[2], v[3], v[4], v[0], v[1]};
         return V{{"up", e.up,
                   detail::try_analytic([&] { return occ_lt_exit_up(qr, s.quadrature); })},
                  {"down", e.down, detail::try_analytic([&] {
                     return occ_lt_exit_down(qr, s.quadrature);
                   })}};
       }},
      {"ruin", {"x"}, "P_x(U drops below 0)",
       [](S s, C cfg, const P& v) {
         const auto rm = s.refracted();
         return V{{"ruin", estimate_ruin(rm, v[0], cfg), detail::try_analytic([&] {
                     return ruin_prob_U(rm, v[0], s.quadrature);
                   })}};
       }},
      {"bankruptcy", {"q", "x"}, "bankruptcy with an Exp(1) hazard clock",
       [](S s, C cfg, const P& v) {
         const auto rm = s.refracted();
         const auto paths = simulate_ruin_paths(rm, v[1], cfg);
         const double q = v[0];
         auto est = summarize(paths, rm, cfg, [&](const PathOutcome& o) {
           return bankrupt(o, q) ? 1.0 : 0.0;
         });
         auto surv = summarize(paths, rm, cfg, [&](const PathOutcome& o) {
           return o.exit != Exit::down ? std::exp(-q * o.occupation) : 0.0;
         });
         auto ruin_lt = summarize(paths, rm, cfg, [&](const PathOutcome& o) {
           return o.exit == Exit::down ? std::exp(-q * o.occupation) : 0.0;
         });
         return V{
             {"bankruptcy", est, detail::try_analytic([&] {
                return prob_bankruptcy(rm, v[1], q, s.quadrature);
              })},
             {"survival-lt", surv, detail::try_analytic([&] {
                return survival_lt(rm, v[1], q, s.quadrature);
              })},
             {"ruin-lt", ruin_lt, detail::try_analytic([&] {
                return bankruptcy_lt_ruin_finite(rm, v[1], q, s.quadrature);
              })}};
       }},
      {"parisian", {"q", "x"}, "Parisian ruin with per-excursion Exp(q) clocks",
       [](S s, C cfg, const P& v) {
         const auto rm = s.refracted();
         const auto paths = simulate_free_paths(rm, v[1], cfg);
         const double q = v[0];
         auto clocks = summarize(paths, rm, cfg, [&](const PathOutcome& o) {
           return parisian_ruined(o, q) ? 1.0 : 0.0;
         });
         auto occ = summarize(paths, rm, cfg, [&](const PathOutcome& o) {
           return 1.0 - std::exp(-q * o.occupation);
         });
         const auto analytic = detail::try_analytic(
             [&] { return prob_parisian(rm, v[1], q, s.quadrature); });
         return V{{"parisian-clocks", clocks, analytic},
                  {"parisian-occupation", occ, analytic}};
       }},
      {"total-occupation-lt", {"q", "x"}, "E_x[e^{-q occ}] over the horizon",
       [](S s, C cfg, const P& v) {
         const auto rm = s.refracted();
         return V{{"total-occupation-lt",
                   estimate_total_occupation_lt(rm, v[1], v[0], cfg),
                   detail::try_analytic([&] {
                     return total_occupation_lt(rm, v[1], v[0], s.quadrature);
                   })}};
       }},
      {"reach-up", {"q", "x", "c"}, "E_x[e^{-q occ}; k_c+ < horizon]",
       [](S s, C cfg, const P& v) {
         const auto rm = s.refracted();
         return V{{"reach-up", estimate_reach_up(rm, v[1], v[2], v[0], cfg),
                   detail::try_analytic([&] {
                     return occ_lt_reach_up(rm, v[1], v[2], v[0], s.quadrature);
                   })}};
       }},
  };
  return targets;
}

inline const SimTarget* find_sim_target(const std::string& name) {
  for (const auto& t : sim_targets())
    if (t.name == name) return &t;
  return nullptr;
}

}  // namespace refracted_levy::cli
