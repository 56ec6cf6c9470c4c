// Ruin, bankruptcy and Parisian ruin for the Cramer-Lundberg reference model,
// each next to a simulated estimate.

#include <cstdio>

#include "refracted_levy/mc_oracle.hpp"
#include "refracted_levy/occupation.hpp"
#include "refracted_levy/refracted.hpp"

int main() {
  using namespace refracted_levy;
  const LevyModel x = LevyModel::cramer_lundberg(1.5, 1.0, {{1.0, 1.0}});
  const RefractedModel u(x, 0.25, 1.0);

  SimConfig cfg;
  cfg.n_paths = 20000;
  cfg.seed = 7;

  const double x0 = 1.2;
  const double q = 0.5;
  std::printf("classical ruin of X     %.6f\n", ruin_prob_X(x, x0));
  std::printf("ruin of U               %.6f\n", ruin_prob_U(u, x0));

  const auto ruin_paths = simulate_ruin_paths(u, x0, cfg);
  const auto sim_ruin = summarize(ruin_paths, u, cfg, [](const PathOutcome& o) {
    return o.exit == Exit::down ? 1.0 : 0.0;
  });
  std::printf("  simulated             %.6f +- %.6f\n", sim_ruin.mean, sim_ruin.std_error);

  std::printf("bankruptcy, q = %.1f     %.6f\n", q, prob_bankruptcy(u, x0, q));
  const auto sim_bank = summarize(ruin_paths, u, cfg, [&](const PathOutcome& o) {
    return bankrupt(o, q) ? 1.0 : 0.0;
  });
  std::printf("  simulated             %.6f +- %.6f\n", sim_bank.mean, sim_bank.std_error);

  std::printf("Parisian ruin, q = %.1f  %.6f\n", q, prob_parisian(u, x0, q));
  const auto sim_par = estimate_parisian(u, x0, q, cfg);
  std::printf("  simulated             %.6f +- %.6f\n", sim_par.mean, sim_par.std_error);

  const OccupationQuery qr{u, x0, 0.0, 3.0, 0.2, q};
  std::printf("E[e^{-p k_0 - q occ}; k_0 < k_3]  %.6f\n", occ_lt_exit_down(qr));
  return 0;
}
