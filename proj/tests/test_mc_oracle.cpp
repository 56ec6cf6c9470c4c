#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "refracted_levy/mc_oracle.hpp"
#include "refracted_levy/occupation.hpp"

using namespace refracted_levy;

namespace {

const LevyModel kCL = LevyModel::cramer_lundberg(1.5, 1.0, {{1.0, 1.0}});
const LevyModel kBM = LevyModel::brownian(1.0, 1.0);
const LevyModel kMix(2.0, 0.5, JumpSpec(1.5, {{0.4, 0.8}, {0.6, 3.0}}));
const RefractedModel kRmCL(kCL, 0.25, 1.0);
const RefractedModel kRmBM(kBM, 0.25, 1.0);

SimConfig mc(std::size_t n, std::uint64_t seed, double horizon) {
  SimConfig cfg;
  cfg.n_paths = n;
  cfg.seed = seed;
  cfg.horizon = horizon;
  cfg.threads = 1;
  return cfg;
}

PathOutcome one_path(const RefractedModel& rm, const PathSpec& ps, const SimConfig& cfg,
                     std::uint64_t index, std::vector<PathEvent>* trace = nullptr) {
  auto motion = path_engine(cfg.seed, index, 0);
  auto clocks = path_engine(cfg.seed, index, 1);
  return simulate_refracted_path(rm, ps, cfg, motion, clocks, false, trace);
}

bool same(const SimEstimate& a, const SimEstimate& b) {
  return a.mean == b.mean && a.std_error == b.std_error && a.n_paths == b.n_paths &&
         a.n_censored == b.n_censored;
}

}  // namespace

TEST(SimulatePath, AlphaZeroFollowsTheUnrefractedPath) {
  // Rebuild X from the same motion stream: Exp(eta) waiting times, Exp(1)
  // claims, slope c throughout.
  const RefractedModel rm(kCL, 0.0, 1.0);
  const auto cfg = mc(1, 31, 30.0);
  for (std::uint64_t i = 0; i < 20; ++i) {
    std::vector<PathEvent> trace;
    const auto out = one_path(rm, {2.0, 0.0}, cfg, i, &trace);
    auto rng = path_engine(cfg.seed, i, 0);
    double t = 0.0, claims = 0.0;
    std::size_t jumps = 0;
    for (const auto& e : trace) {
      if (e.kind != EventKind::jump) continue;
      t += std::exponential_distribution<double>(1.0)(rng);
      claims += std::exponential_distribution<double>(1.0)(rng);
      ++jumps;
      EXPECT_NEAR(e.time, t, 1e-12 * std::max(1.0, t));
      EXPECT_NEAR(e.level, 2.0 + 1.5 * t - claims, 1e-10);
    }
    EXPECT_EQ(jumps, out.n_jumps);
  }
}

TEST(SimulatePath, DeterministicDrift) {
  const RefractedModel rm(LevyModel(1.0, 0.0), 0.25, 1.0);
  const auto cfg = mc(1, 1, 100.0);
  PathSpec above{1.5, 0.0, 3.0};
  auto out = one_path(rm, above, cfg, 0);
  EXPECT_EQ(out.exit, Exit::up);
  EXPECT_EQ(out.occupation, 0.0);
  EXPECT_NEAR(out.exit_time, 1.5 / 0.75, 1e-14);
  EXPECT_EQ(out.n_excursions, 0u);

  PathSpec below{0.4, 0.0, 3.0};
  out = one_path(rm, below, cfg, 0);
  EXPECT_EQ(out.exit, Exit::up);
  EXPECT_NEAR(out.occupation, 0.6, 1e-14);
  EXPECT_NEAR(out.exit_time, 0.6 + 2.0 / 0.75, 1e-14);
  EXPECT_EQ(out.n_excursions, 1u);

  // Drift-only exactness of the estimators: the indicator is deterministic.
  const auto est = estimate_occupation_joint(rm, 0.2, 0.5, 0.4, 0.0, 3.0, mc(50, 2, 100.0));
  EXPECT_NEAR(est.up.mean, std::exp(-0.2 * (0.6 + 2.0 / 0.75) - 0.5 * 0.6), 1e-14);
  EXPECT_LT(est.up.std_error, 1e-15);
  EXPECT_EQ(est.down.mean, 0.0);
}

TEST(SimulatePath, FirstRefractionCrossingUsesSlopeBelowThreshold) {
  const auto cfg = mc(1, 32, 50.0);
  int checked = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    std::vector<PathEvent> trace;
    one_path(kRmCL, {0.5}, cfg, i, &trace);
    ASSERT_FALSE(trace.empty());
    const auto& first = trace.front();
    if (first.kind == EventKind::refraction_crossing) {
      EXPECT_NEAR(first.time, 0.5 / 1.5, 1e-15);
      EXPECT_EQ(first.level, 1.0);
      ++checked;
    } else {
      EXPECT_EQ(first.kind, EventKind::jump);
      EXPECT_LT(first.time, 0.5 / 1.5);
    }
  }
  // P(no claim before 1/3) = e^{-1/3}: most of the 200 paths.
  EXPECT_GT(checked, 100);
}

TEST(SimulatePath, TraceTimesAreNondecreasing) {
  const auto cfg = mc(1, 33, 40.0);
  for (const auto& rm : {kRmCL, RefractedModel(kMix, 0.3, 2.0)})
    for (std::uint64_t i = 0; i < 10; ++i) {
      std::vector<PathEvent> trace;
      PathSpec ps{1.5};
      ps.trace_clock_rate = 0.5;
      SimConfig c = cfg;
      c.dt = 1e-2;
      auto motion = path_engine(c.seed, i, 0);
      auto clocks = path_engine(c.seed, i, 1);
      simulate_refracted_path(rm, ps, c, motion, clocks, false, &trace);
      std::vector<double> times;
      for (const auto& e : trace)
        if (e.kind != EventKind::clock_ring) times.push_back(e.time);
      for (std::size_t k = 1; k < times.size(); ++k) EXPECT_LE(times[k - 1], times[k]);
    }
}

TEST(SimulatePath, StartOutsideTheBand) {
  const auto cfg = mc(1, 1, 10.0);
  EXPECT_EQ(one_path(kRmCL, {-0.1, 0.0}, cfg, 0).exit, Exit::down);
  EXPECT_EQ(one_path(kRmCL, {3.0, 0.0, 3.0}, cfg, 0).exit, Exit::up);
}

TEST(EstimateExit, EventsPartitionWithCensoring) {
  const auto est = estimate_occupation_joint(kRmCL, 0.0, 0.0, 1.0, 0.0, 3.0, mc(5000, 34, 2.0));
  EXPECT_GT(est.up.n_censored, 0u);
  // Means are counts over n: recover the counts, which add up to n exactly.
  const double n = 5000.0;
  const double up = std::round(est.up.mean * n), down = std::round(est.down.mean * n);
  EXPECT_NEAR(est.up.mean * n, up, 1e-9);
  EXPECT_NEAR(est.down.mean * n, down, 1e-9);
  EXPECT_EQ(up + down + static_cast<double>(est.up.n_censored), n);
  EXPECT_EQ(est.up.n_censored, est.down.n_censored);
  EXPECT_EQ(est.up.n_paths, 5000u);
}

TEST(EstimateBankruptcy, RateZeroIsRuinFrequency) {
  const auto cfg = mc(5000, 35, 100.0);
  EXPECT_TRUE(same(estimate_bankruptcy(kRmCL, 0.8, 0.0, cfg), estimate_ruin(kRmCL, 0.8, cfg)));
}

TEST(EstimateBankruptcy, StartBelowZeroIsCertain) {
  const auto est = estimate_bankruptcy(kRmCL, -0.5, 0.4, mc(100, 36, 10.0));
  EXPECT_EQ(est.mean, 1.0);
  EXPECT_EQ(est.std_error, 0.0);
}

TEST(EstimateParisian, FastClocksRingOnEveryExcursion) {
  const auto cfg = mc(10000, 37, 300.0);
  const auto paths = simulate_free_paths(kRmCL, 1.5, cfg);
  const auto fast = summarize(paths, kRmCL, cfg, [](const PathOutcome& o) {
    return parisian_ruined(o, 1e9) ? 1.0 : 0.0;
  });
  const auto entered = summarize(paths, kRmCL, cfg, [](const PathOutcome& o) {
    return o.occupation > 0.0 ? 1.0 : 0.0;
  });
  EXPECT_NEAR(fast.mean, entered.mean, 1e-3);
  EXPECT_LT(std::abs(entered.mean - (1.0 - occupation_atom(kRmCL, 1.5))), 3.0 * entered.std_error);
}

TEST(EstimateParisian, ClocksAgreeWithOccupationEstimator) {
  // Two estimators of the same probability on independent path sets.
  const auto clocks = estimate_parisian(kRmCL, 0.5, 0.3, mc(20000, 38, 400.0));
  const auto occ = estimate_total_occupation_lt(kRmCL, 0.5, 0.3, mc(20000, 39, 400.0));
  EXPECT_LT(std::abs(clocks.mean - (1.0 - occ.mean)),
            3.0 * std::hypot(clocks.std_error, occ.std_error));
}

TEST(Determinism, IndependentOfThreadCount) {
  auto cfg = mc(3000, 40, 200.0);
  const auto serial = simulate_free_paths(kRmCL, 1.2, cfg);
  for (unsigned threads : {2u, 3u, 8u}) {
    cfg.threads = threads;
    const auto par = simulate_free_paths(kRmCL, 1.2, cfg);
    ASSERT_EQ(par.size(), serial.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
      EXPECT_EQ(par[i].exit_time, serial[i].exit_time);
      EXPECT_EQ(par[i].occupation, serial[i].occupation);
      EXPECT_EQ(par[i].min_clock_ratio, serial[i].min_clock_ratio);
    }
    EXPECT_TRUE(same(estimate_parisian(kRmCL, 1.2, 0.5, cfg),
                     estimate_parisian(kRmCL, 1.2, 0.5, mc(3000, 40, 200.0))));
  }
}

TEST(Determinism, SeedChangesTheSample) {
  EXPECT_FALSE(same(estimate_ruin(kRmCL, 1.0, mc(2000, 41, 100.0)),
                    estimate_ruin(kRmCL, 1.0, mc(2000, 42, 100.0))));
}

TEST(Antithetic, PartnersNegateTheGaussianPart) {
  // b far above the band: no refraction, U = x + t + B_t until it exits.
  const RefractedModel rm(kBM, 0.25, 1000.0);
  auto cfg = mc(200, 43, 0.5);
  cfg.dt = 1e-3;
  cfg.antithetic = true;
  const auto paths = simulate_paths(rm, {0.0}, cfg);
  for (std::size_t i = 0; i < paths.size(); i += 2) {
    ASSERT_EQ(paths[i].exit, Exit::censored);
    EXPECT_NEAR(paths[i].terminal + paths[i + 1].terminal, 2.0 * 0.5, 1e-10);
  }
}

TEST(Antithetic, IgnoredForBoundedVariationAndNeedsEvenCount) {
  auto cfg = mc(1001, 44, 50.0);
  cfg.antithetic = true;
  EXPECT_FALSE(cfg.uses_pairs(kCL));
  EXPECT_NO_THROW(cfg.validate(kCL));
  EXPECT_THROW(cfg.validate(kBM), InputError);
}

TEST(SimConfig, Validation) {
  auto cfg = mc(0, 1, 10.0);
  EXPECT_THROW(cfg.validate(kCL), InputError);
  cfg = mc(10, 1, 0.0);
  EXPECT_THROW(cfg.validate(kCL), InputError);
  cfg = mc(10, 1, 10.0);
  cfg.dt = 0.0;
  EXPECT_NO_THROW(cfg.validate(kCL));
  EXPECT_THROW(cfg.validate(kBM), InputError);
}

TEST(Censoring, Reported) {
  const auto est = estimate_ruin(kRmCL, 1.0, mc(20000, 45, 400.0));
  EXPECT_GT(est.n_censored, 0u);
  EXPECT_EQ(est.n_censored + static_cast<std::size_t>(std::lround(est.mean * 20000)), 20000u);
}

TEST(Censoring, HorizonDoublingMovesLessThanOneSE) {
  // The acceptance configurations: ruin of X and U, bankruptcy and Parisian
  // ruin at x in {0.5, 1.5}, q in {0.2, 0.8}, and the exits from 1.2 in [0, 3].
  const RefractedModel unrefracted(kCL, 0.0, 1.0);
  const auto base = mc(10000, 46, 1000.0);
  auto twice = base;
  twice.horizon = 2000.0;
  auto check = [](const SimEstimate& a, const SimEstimate& b, const char* what, double x) {
    EXPECT_LT(std::abs(a.mean - b.mean), a.std_error) << what << " x=" << x;
  };
  for (double x : {0.5, 1.5}) {
    check(estimate_ruin(unrefracted, x, base), estimate_ruin(unrefracted, x, twice), "ruin X", x);
    const auto ruin_a = simulate_ruin_paths(kRmCL, x, base);
    const auto ruin_b = simulate_ruin_paths(kRmCL, x, twice);
    const auto free_a = simulate_free_paths(kRmCL, x, base);
    const auto free_b = simulate_free_paths(kRmCL, x, twice);
    auto ruined = [](const PathOutcome& o) { return o.exit == Exit::down ? 1.0 : 0.0; };
    check(summarize(ruin_a, kRmCL, base, ruined), summarize(ruin_b, kRmCL, twice, ruined),
          "ruin U", x);
    for (double q : {0.2, 0.8}) {
      auto bank = [q](const PathOutcome& o) { return bankrupt(o, q) ? 1.0 : 0.0; };
      auto paris = [q](const PathOutcome& o) { return parisian_ruined(o, q) ? 1.0 : 0.0; };
      check(summarize(ruin_a, kRmCL, base, bank), summarize(ruin_b, kRmCL, twice, bank),
            "bankruptcy", x);
      check(summarize(free_a, kRmCL, base, paris), summarize(free_b, kRmCL, twice, paris),
            "Parisian", x);
    }
  }
  const auto exit_a = estimate_exit(kRmCL, 0.3, 1.2, 0.0, 3.0, base);
  const auto exit_b = estimate_exit(kRmCL, 0.3, 1.2, 0.0, 3.0, twice);
  check(exit_a.up, exit_b.up, "exit up", 1.2);
  check(exit_a.down, exit_b.down, "exit down", 1.2);
}

TEST(EulerConvergence, HalvingStepMovesTowardAnalytic) {
  const double analytic = exit_up_U(kRmBM, 0.0, 1.2, 0.0, 3.0);
  double prev_error = 1.0;
  for (double dt : {0.04, 0.02, 0.01}) {
    auto cfg = mc(40000, 5, 200.0);
    cfg.dt = dt;
    cfg.antithetic = true;
    const auto est = estimate_exit(kRmBM, 0.0, 1.2, 0.0, 3.0, cfg);
    const double error = std::abs(est.up.mean - analytic);
    EXPECT_LT(error, prev_error) << "dt=" << dt;
    prev_error = error;
  }
}

TEST(Summation, CompensatedAndOrderFixed) {
  CompensatedSum s;
  for (double v : {1e16, 1.0, -1e16}) s.add(v);
  EXPECT_EQ(s.value(), 1.0);
  const auto stats = summarize_samples({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(stats.mean, 2.5);
  EXPECT_NEAR(stats.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
}
