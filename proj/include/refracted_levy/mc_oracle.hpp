#pragma once

// Brute-force simulation of the refracted process U, independent of the
// scale-function code. Bounded-variation models (sigma = 0) are simulated
// exactly: between jumps the path is linear with slope c below b and
// c - alpha at or above b, and every level crossing is solved in closed form.
// Models with sigma > 0 use Euler steps with a between-step crossing check.
//
// Each path owns two engines seeded from (seed, path index, stream): stream 0
// drives the motion, stream 1 the exponential clocks. Outcomes are written by
// index and reduced in index order, so estimates do not depend on the number
// of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "refracted_levy/errors.hpp"
#include "refracted_levy/levy_model.hpp"

namespace refracted_levy {

struct SimConfig {
  std::size_t n_paths = 100000;
  double horizon = 1000.0;
  double dt = 1e-3;  ///< Euler step; ignored when sigma = 0
  std::uint64_t seed = 1;
  bool antithetic = false;  ///< paired paths with negated Gaussian increments
  unsigned threads = 0;     ///< 0: hardware concurrency

  void validate(const LevyModel& m) const {
    if (n_paths < 1) throw InputError("simulation needs n_paths >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
      throw InputError("simulation needs a finite horizon > 0");
    if (m.sigma() > 0.0 && !(dt > 0.0))
      throw InputError("simulation with sigma > 0 needs dt > 0");
    if (uses_pairs(m) && n_paths % 2 != 0)
      throw InputError("antithetic simulation needs an even n_paths");
  }

  bool uses_pairs(const LevyModel& m) const noexcept {
    return antithetic && m.sigma() > 0.0;
  }

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct SimEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::size_t n_censored = 0;

  double censored_fraction() const noexcept {
    return n_paths == 0 ? 0.0
                        : static_cast<double>(n_censored) /
                              static_cast<double>(n_paths);
  }
};

enum class EventKind { jump, refraction_crossing, exit, clock_ring };

inline const char* to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::jump: return "jump";
    case EventKind::refraction_crossing: return "refraction-crossing";
    case EventKind::exit: return "exit";
    case EventKind::clock_ring: return "clock-ring";
  }
  return "unknown";
}

struct PathEvent {
  double time = 0.0;
  double level = 0.0;
  EventKind kind = EventKind::jump;
};

/// Start point and absorbing levels. Exit below happens when U < lower, exit
/// above when U >= upper.
struct PathSpec {
  double x0 = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  /// Only used to place clock-ring events in a trace.
  double trace_clock_rate = 0.0;
};

enum class Exit { up, down, censored };

struct PathOutcome {
  Exit exit = Exit::censored;
  double exit_time = 0.0;   ///< horizon when censored
  double occupation = 0.0;  ///< time with U < b up to exit or horizon
  double terminal = 0.0;
  /// Exp(1) variable for the bankruptcy clock: bankrupt iff ruined or
  /// bankruptcy_clock < q * occupation.
  double bankruptcy_clock = 0.0;
  /// min over excursions below b of E_k / d_k with E_k ~ Exp(1): Parisian
  /// ruin at rate q iff this is < q. Infinite when no excursion.
  double min_clock_ratio = std::numeric_limits<double>::infinity();
  std::size_t n_jumps = 0;
  std::size_t n_excursions = 0;
};

/// Engine for one (seed, path, stream) triple.
inline std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path,
                                   std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path),
                    static_cast<std::uint32_t>(path >> 32), stream};
  return std::mt19937_64(seq);
}

namespace detail {

inline double sample_jump(const JumpSpec& js, std::mt19937_64& rng) {
  const auto& terms = js.terms();
  std::size_t k = 0;
  if (terms.size() > 1) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (k = 0; k + 1 < terms.size(); ++k) {
      acc += terms[k].weight;
      if (u < acc) break;
    }
  }
  return std::exponential_distribution<double>(terms[k].rate)(rng);
}

// Excursion bookkeeping below b; clocks come from their own stream.
class ExcursionClocks {
 public:
  ExcursionClocks(std::mt19937_64& rng, PathOutcome& out,
                  std::vector<PathEvent>* trace, double trace_rate)
      : rng_(rng), out_(out), trace_(trace), trace_rate_(trace_rate) {}

  void open(double t, double occ) {
    active_ = true;
    start_time_ = t;
    start_occ_ = occ;
    clock_ = std::exponential_distribution<double>(1.0)(rng_);
    ++out_.n_excursions;
  }

  void close(double occ) {
    if (!active_) return;
    active_ = false;
    const double d = occ - start_occ_;
    if (d > 0.0) out_.min_clock_ratio = std::min(out_.min_clock_ratio, clock_ / d);
    if (trace_ && trace_rate_ > 0.0 && clock_ / trace_rate_ < d)
      trace_->push_back({start_time_ + clock_ / trace_rate_,
                         std::numeric_limits<double>::quiet_NaN(),
                         EventKind::clock_ring});
  }

  bool active() const noexcept { return active_; }

 private:
  std::mt19937_64& rng_;
  PathOutcome& out_;
  std::vector<PathEvent>* trace_;
  double trace_rate_;
  bool active_ = false;
  double start_time_ = 0.0;
  double start_occ_ = 0.0;
  double clock_ = 0.0;
};

inline void record(std::vector<PathEvent>* trace, double t, double level,
                   EventKind kind) {
  if (trace) trace->push_back({t, level, kind});
}

inline PathOutcome simulate_bounded_variation(const RefractedModel& rm,
                                              const PathSpec& ps,
                                              const SimConfig& cfg,
                                              std::mt19937_64& motion,
                                              ExcursionClocks& clocks,
                                              PathOutcome& out,
                                              std::vector<PathEvent>* trace) {
  const auto& xm = rm.x_model();
  const double b = rm.b();
  const double slope_low = xm.drift();
  const double slope_high = xm.drift() - rm.alpha();
  const double eta = xm.jumps().eta();
  const double inf = std::numeric_limits<double>::infinity();
  auto next_arrival = [&](double t) {
    return eta > 0.0 ? t + std::exponential_distribution<double>(eta)(motion)
                     : inf;
  };

  double t = 0.0;
  double u = ps.x0;
  double occ = 0.0;
  double next_jump = next_arrival(t);
  auto finish = [&](Exit e, double when, double level) {
    clocks.close(occ);
    out.exit = e;
    out.exit_time = when;
    out.occupation = occ;
    out.terminal = level;
    if (e != Exit::censored) record(trace, when, level, EventKind::exit);
    return out;
  };

  for (;;) {
    const double t_end = std::min(next_jump, cfg.horizon);
    if (u < b) {
      const double t_b = t + (b - u) / slope_low;
      if (t_b <= t_end) {
        occ += t_b - t;
        t = t_b;
        u = b;
        clocks.close(occ);
        record(trace, t, u, EventKind::refraction_crossing);
        if (u >= ps.upper) return finish(Exit::up, t, u);
        continue;
      }
      occ += t_end - t;
      u += slope_low * (t_end - t);
    } else {
      const double t_c = t + (ps.upper - u) / slope_high;
      if (t_c <= t_end) return finish(Exit::up, t_c, ps.upper);
      u += slope_high * (t_end - t);
    }
    t = t_end;
    if (next_jump > cfg.horizon) return finish(Exit::censored, cfg.horizon, u);

    const double before = u;
    u -= sample_jump(xm.jumps(), motion);
    ++out.n_jumps;
    record(trace, t, u, EventKind::jump);
    if (before >= b && u < b) {
      clocks.open(t, occ);
      record(trace, t, u, EventKind::refraction_crossing);
    }
    if (u < ps.lower) return finish(Exit::down, t, u);
    next_jump = next_arrival(t);
  }
}

inline PathOutcome simulate_euler(const RefractedModel& rm, const PathSpec& ps,
                                  const SimConfig& cfg, std::mt19937_64& motion,
                                  ExcursionClocks& clocks, PathOutcome& out,
                                  bool negate, std::vector<PathEvent>* trace) {
  const auto& xm = rm.x_model();
  const double b = rm.b();
  const double sigma = xm.sigma();
  const double eta = xm.jumps().eta();
  const double inf = std::numeric_limits<double>::infinity();
  std::normal_distribution<double> normal(0.0, 1.0);
  auto next_arrival = [&](double t) {
    return eta > 0.0 ? t + std::exponential_distribution<double>(eta)(motion)
                     : inf;
  };

  double t = 0.0;
  double u = ps.x0;
  double occ = 0.0;
  double next_jump = next_arrival(t);
  auto finish = [&](Exit e, double when, double level) {
    clocks.close(occ);
    out.exit = e;
    out.exit_time = when;
    out.occupation = occ;
    out.terminal = level;
    if (e != Exit::censored) record(trace, when, level, EventKind::exit);
    return out;
  };
  auto below = [&](double v) { return v < b ? 1.0 : 0.0; };

  while (t < cfg.horizon) {
    double t_next = std::min({t + cfg.dt, cfg.horizon, next_jump});
    const bool jump_now = t_next == next_jump;
    const double h = t_next - t;
    const double drift = u > b ? xm.drift() - rm.alpha() : xm.drift();
    double zn = normal(motion);
    if (negate) zn = -zn;
    const double v = u + drift * h + sigma * std::sqrt(h) * zn;
    occ += 0.5 * h * (below(u) + below(v));
    t = t_next;
    if (v >= ps.upper) return finish(Exit::up, t, v);
    if (v < ps.lower) return finish(Exit::down, t, v);
    if (u >= b && v < b) {
      clocks.open(t, occ);
      record(trace, t, v, EventKind::refraction_crossing);
    } else if (u < b && v >= b) {
      clocks.close(occ);
      record(trace, t, v, EventKind::refraction_crossing);
    }
    u = v;
    if (jump_now) {
      const double before = u;
      u -= sample_jump(xm.jumps(), motion);
      ++out.n_jumps;
      record(trace, t, u, EventKind::jump);
      if (before >= b && u < b) {
        clocks.open(t, occ);
        record(trace, t, u, EventKind::refraction_crossing);
      }
      if (u < ps.lower) return finish(Exit::down, t, u);
      next_jump = next_arrival(t);
    }
  }
  return finish(Exit::censored, cfg.horizon, u);
}

}  // namespace detail

/// One path of U from ps.x0 until it leaves [lower, upper) or the horizon.
/// `negate` flips every Gaussian increment (antithetic partner).
inline PathOutcome simulate_refracted_path(const RefractedModel& rm,
                                           const PathSpec& ps,
                                           const SimConfig& cfg,
                                           std::mt19937_64& motion,
                                           std::mt19937_64& clock_rng,
                                           bool negate = false,
                                           std::vector<PathEvent>* trace = nullptr) {
  PathOutcome out;
  out.bankruptcy_clock = std::exponential_distribution<double>(1.0)(clock_rng);
  detail::ExcursionClocks clocks(clock_rng, out, trace, ps.trace_clock_rate);

  if (ps.x0 < ps.lower) {
    out.exit = Exit::down;
    out.terminal = ps.x0;
    detail::record(trace, 0.0, ps.x0, EventKind::exit);
    return out;
  }
  if (ps.x0 >= ps.upper) {
    out.exit = Exit::up;
    out.terminal = ps.x0;
    detail::record(trace, 0.0, ps.x0, EventKind::exit);
    return out;
  }
  if (ps.x0 < rm.b()) clocks.open(0.0, 0.0);

  return rm.x_model().sigma() == 0.0
             ? detail::simulate_bounded_variation(rm, ps, cfg, motion, clocks,
                                                  out, trace)
             : detail::simulate_euler(rm, ps, cfg, motion, clocks, out, negate,
                                      trace);
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. fn must only write
/// to slot i of its output.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  constexpr std::size_t chunk = 256;
  auto worker = [&] {
    for (;;) {
      const std::size_t lo = next.fetch_add(chunk);
      if (lo >= n) return;
      const std::size_t hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
}

/// cfg.n_paths independent outcomes, in path-index order.
inline std::vector<PathOutcome> simulate_paths(const RefractedModel& rm,
                                               const PathSpec& ps,
                                               const SimConfig& cfg) {
  cfg.validate(rm.x_model());
  const bool pairs = cfg.uses_pairs(rm.x_model());
  std::vector<PathOutcome> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    // Antithetic partners share both engines; clocks stay common too.
    const std::uint64_t stream_index = pairs ? i / 2 : i;
    auto motion = path_engine(cfg.seed, stream_index, 0);
    auto clock_rng = path_engine(cfg.seed, stream_index, 1);
    out[i] = simulate_refracted_path(rm, ps, cfg, motion, clock_rng,
                                     pairs && (i % 2 == 1));
  });
  return out;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleSummary {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error of i.i.d. samples, summed in index order.
inline SampleSummary summarize_samples(const std::vector<double>& v) {
  if (v.empty()) return {};
  CompensatedSum s;
  for (double x : v) s.add(x);
  const double n = static_cast<double>(v.size());
  const double mean = s.value() / n;
  if (v.size() < 2) return {mean, 0.0};
  CompensatedSum ss;
  for (double x : v) ss.add((x - mean) * (x - mean));
  return {mean, std::sqrt(ss.value() / (n - 1.0) / n)};
}

/// Estimate of E[fn(outcome)] over simulated paths. Antithetic pairs are
/// averaged before the variance is taken.
template <class F>
SimEstimate summarize(const std::vector<PathOutcome>& paths,
                      const RefractedModel& rm, const SimConfig& cfg, F&& fn) {
  std::vector<double> samples;
  const bool pairs = cfg.uses_pairs(rm.x_model());
  std::size_t censored = 0;
  for (const auto& p : paths)
    if (p.exit == Exit::censored) ++censored;
  if (pairs) {
    samples.reserve(paths.size() / 2);
    for (std::size_t i = 0; i + 1 < paths.size(); i += 2)
      samples.push_back(0.5 * (fn(paths[i]) + fn(paths[i + 1])));
  } else {
    samples.reserve(paths.size());
    for (const auto& p : paths) samples.push_back(fn(p));
  }
  const auto s = summarize_samples(samples);
  return {s.mean, s.std_error, paths.size(), censored};
}

struct ExitEstimates {
  SimEstimate up;
  SimEstimate down;
};

namespace detail {

inline void require_exit_levels(const RefractedModel& rm, double x, double a,
                                double c) {
  if (!(a <= x && x <= c && a <= rm.b() && rm.b() <= c))
    throw OrderingError("simulated exit needs a <= x <= c and a <= b <= c");
}

}  // namespace detail

/// E_x[e^{-p kappa - q occ}; event] for the upward and downward exits of
/// [a, c]. Censored paths count in neither event.
inline ExitEstimates estimate_occupation_joint(const RefractedModel& rm,
                                               double p, double q, double x,
                                               double a, double c,
                                               const SimConfig& cfg) {
  detail::require_exit_levels(rm, x, a, c);
  const auto paths = simulate_paths(rm, {x, a, c}, cfg);
  auto weight = [&](const PathOutcome& o) {
    return std::exp(-p * o.exit_time - q * o.occupation);
  };
  return {summarize(paths, rm, cfg,
                    [&](const PathOutcome& o) {
                      return o.exit == Exit::up ? weight(o) : 0.0;
                    }),
          summarize(paths, rm, cfg, [&](const PathOutcome& o) {
            return o.exit == Exit::down ? weight(o) : 0.0;
          })};
}

/// E_x[e^{-q kappa}; event] for the two exits of [a, c]. With alpha = 0 this
/// is the exit problem of X itself.
inline ExitEstimates estimate_exit(const RefractedModel& rm, double q, double x,
                                   double a, double c, const SimConfig& cfg) {
  return estimate_occupation_joint(rm, q, 0.0, x, a, c, cfg);
}

/// Paths of U started at x and killed below 0, for the ruin-type estimators.
inline std::vector<PathOutcome> simulate_ruin_paths(const RefractedModel& rm,
                                                    double x,
                                                    const SimConfig& cfg) {
  return simulate_paths(rm, {x, 0.0}, cfg);
}

/// P_x(ruin before the horizon). Survivors at the horizon are censored.
inline SimEstimate estimate_ruin(const RefractedModel& rm, double x,
                                 const SimConfig& cfg) {
  const auto paths = simulate_ruin_paths(rm, x, cfg);
  return summarize(paths, rm, cfg, [](const PathOutcome& o) {
    return o.exit == Exit::down ? 1.0 : 0.0;
  });
}

/// Bankruptcy indicator with rate q on [0, b) and infinite rate below 0.
inline bool bankrupt(const PathOutcome& o, double q) noexcept {
  return o.exit == Exit::down || o.bankruptcy_clock < q * o.occupation;
}

inline SimEstimate estimate_bankruptcy(const RefractedModel& rm, double x,
                                       double q, const SimConfig& cfg) {
  const auto paths = simulate_ruin_paths(rm, x, cfg);
  return summarize(paths, rm, cfg, [&](const PathOutcome& o) {
    return bankrupt(o, q) ? 1.0 : 0.0;
  });
}

/// E_x[e^{-q occ}; ruin] and E_x[e^{-q occ}; no ruin], occupation taken up to
/// ruin.
inline ExitEstimates estimate_ruin_occupation_lt(const RefractedModel& rm,
                                                 double x, double q,
                                                 const SimConfig& cfg) {
  const auto paths = simulate_ruin_paths(rm, x, cfg);
  return {summarize(paths, rm, cfg,
                    [&](const PathOutcome& o) {
                      return o.exit != Exit::down
                                 ? std::exp(-q * o.occupation)
                                 : 0.0;
                    }),
          summarize(paths, rm, cfg, [&](const PathOutcome& o) {
            return o.exit == Exit::down ? std::exp(-q * o.occupation) : 0.0;
          })};
}

/// Parisian ruin with independent Exp(q) clocks per excursion below b.
inline bool parisian_ruined(const PathOutcome& o, double q) noexcept {
  return o.min_clock_ratio < q;
}

/// Paths of U with no absorbing level, for occupation-type estimators.
inline std::vector<PathOutcome> simulate_free_paths(const RefractedModel& rm,
                                                    double x,
                                                    const SimConfig& cfg) {
  return simulate_paths(rm, {x}, cfg);
}

inline SimEstimate estimate_parisian(const RefractedModel& rm, double x,
                                     double q, const SimConfig& cfg) {
  const auto paths = simulate_free_paths(rm, x, cfg);
  return summarize(paths, rm, cfg, [&](const PathOutcome& o) {
    return parisian_ruined(o, q) ? 1.0 : 0.0;
  });
}

/// E_x[e^{-q occ}] with occupation up to the horizon.
inline SimEstimate estimate_total_occupation_lt(const RefractedModel& rm,
                                                double x, double q,
                                                const SimConfig& cfg) {
  const auto paths = simulate_free_paths(rm, x, cfg);
  return summarize(paths, rm, cfg, [&](const PathOutcome& o) {
    return std::exp(-q * o.occupation);
  });
}

/// E_x[e^{-q occ}; kappa_c^+ < horizon] without a lower barrier.
inline SimEstimate estimate_reach_up(const RefractedModel& rm, double x,
                                     double c, double q, const SimConfig& cfg) {
  if (!(x <= c && rm.b() <= c))
    throw OrderingError("simulated reach-up needs x <= c and b <= c");
  PathSpec ps{x};
  ps.upper = c;
  const auto paths = simulate_paths(rm, ps, cfg);
  return summarize(paths, rm, cfg, [&](const PathOutcome& o) {
    return o.exit == Exit::up ? std::exp(-q * o.occupation) : 0.0;
  });
}

/// One draw of X_r - X_0: drift, Gaussian part and compound Poisson jumps.
inline double sample_levy_increment(const LevyModel& m, double r,
                                    std::mt19937_64& rng) {
  double v = m.drift() * r;
  if (m.sigma() > 0.0)
    v += m.sigma() * std::sqrt(r) *
         std::normal_distribution<double>(0.0, 1.0)(rng);
  if (m.has_jumps()) {
    const auto n = std::poisson_distribution<long>(m.jumps().eta() * r)(rng);
    for (long k = 0; k < n; ++k) v -= detail::sample_jump(m.jumps(), rng);
  }
  return v;
}

}  // namespace refracted_levy
