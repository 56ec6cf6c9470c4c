#pragma once

// The four rlevy commands, independent of argument parsing. Each writes its
// table or report to `out` and returns an exit code; library errors escape as
// exceptions and are mapped by exit_code_for().

#include <chrono>
#include <exception>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "refracted_levy/cli/grid.hpp"
#include "refracted_levy/cli/model_spec.hpp"
#include "refracted_levy/cli/operations.hpp"
#include "refracted_levy/cli/verify.hpp"
#include "refracted_levy/errors.hpp"
#include "refracted_levy/mc_oracle.hpp"
#include "refracted_levy/scale_function.hpp"
#include "refracted_levy/version.hpp"

namespace refracted_levy::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kDomainError = 3,
  kVerificationFailed = 4,
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return kInputError;
  if (dynamic_cast<const DomainError*>(&e)) return kDomainError;
  return kInputError;
}

enum class Format { csv, json };

struct RunOptions {
  Format format = Format::csv;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> tol;  ///< overrides both quadrature tolerances
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<bool> antithetic;
  unsigned threads = 0;
  bool timing = false;
};

using json = nlohmann::ordered_json;

namespace detail {

inline ModelSpec apply_overrides(ModelSpec spec, const RunOptions& o) {
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw InputError("--tol must be > 0");
    spec.quadrature.abs_tol = *o.tol;
    spec.quadrature.rel_tol = *o.tol;
  }
  auto& c = spec.simulation;
  if (o.seed) c.seed = *o.seed;
  if (o.paths) c.n_paths = *o.paths;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.dt) c.dt = *o.dt;
  if (o.antithetic) c.antithetic = *o.antithetic;
  c.threads = o.threads;
  c.validate(spec.process);
  return spec;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

inline json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

inline std::string tuple_text(const std::vector<std::string>& names,
                              const ParamTuple& t) {
  std::ostringstream o;
  for (std::size_t i = 0; i < names.size(); ++i)
    o << (i ? ", " : "") << names[i] << '=' << format_double(t[i]);
  return o.str();
}

inline json params_json(const std::vector<std::string>& names, const ParamTuple& t) {
  json p = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) p[names[i]] = t[i];
  return p;
}

// Evaluates fn over all tuples in parallel; results keep tuple order and the
// first failing tuple (by index) is reported.
template <class R, class F>
std::vector<R> evaluate_grid(const std::vector<ParamTuple>& tuples,
                             const std::string& what,
                             const std::vector<std::string>& names,
                             unsigned threads, F&& fn) {
  std::vector<R> out(tuples.size());
  std::vector<std::exception_ptr> errors(tuples.size());
  parallel_for(tuples.size(), threads, [&](std::size_t i) {
    try {
      out[i] = fn(tuples[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const InputError& e) {
      throw InputError(what + "(" + tuple_text(names, tuples[i]) + "): " + e.what());
    } catch (const DomainError& e) {
      throw DomainError(what + "(" + tuple_text(names, tuples[i]) + "): " + e.what());
    }
  }
  return out;
}

inline std::vector<ParamAxis> parse_params(const std::vector<std::string>& params) {
  std::vector<ParamAxis> axes;
  for (const auto& p : params) axes.push_back(parse_param(p));
  return axes;
}

}  // namespace detail

/// Usage text listing every eval operation.
inline std::string operation_list() {
  std::ostringstream o;
  o << "operations:\n";
  for (const auto& op : operations()) {
    o << "  " << op.name << '(';
    for (std::size_t i = 0; i < op.params.size(); ++i)
      o << (i ? ", " : "") << op.params[i];
    o << ")  " << op.summary << '\n';
  }
  return o.str();
}

inline std::string sim_target_list() {
  std::ostringstream o;
  o << "targets:\n";
  for (const auto& t : sim_targets()) {
    o << "  " << t.name << '(';
    for (std::size_t i = 0; i < t.params.size(); ++i)
      o << (i ? ", " : "") << t.params[i];
    o << ")  " << t.summary << '\n';
  }
  return o.str();
}

/// `rlevy eval`: one row per grid tuple.
inline int cmd_eval(const ModelSpec& spec_in, const std::string& op_name,
                    const std::vector<std::string>& params, const RunOptions& o,
                    std::ostream& out) {
  const Operation* op = find_operation(op_name);
  if (!op)
    throw InputError("unknown operation '" + op_name + "'\n" + operation_list());
  const ModelSpec spec = detail::apply_overrides(spec_in, o);
  const auto tuples =
      expand_grid(op->params, detail::parse_params(params), {}, op->name);
  const auto t0 = std::chrono::steady_clock::now();
  const auto values = detail::evaluate_grid<OpValue>(
      tuples, op->name, op->params, o.threads,
      [&](const ParamTuple& t) { return op->fn(spec, t); });
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string hash = model_hash(spec);

  if (o.format == Format::json) {
    json doc;
    doc["command"] = "eval";
    doc["operation"] = op->name;
    doc["version"] = kVersion;
    doc["model_hash"] = hash;
    json rows = json::array();
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      json r;
      r["operation"] = op->name;
      r["params"] = detail::params_json(op->params, tuples[i]);
      r["value"] = detail::number_or_null(values[i].value);
      if (values[i].std_error) r["std_error"] = *values[i].std_error;
      r["model_hash"] = hash;
      r["version"] = kVersion;
      rows.push_back(std::move(r));
    }
    doc["records"] = std::move(rows);
    if (o.timing) doc["wall_time_seconds"] = wall;
    out << doc.dump(2) << '\n';
    return kOk;
  }
  out << "operation";
  for (const auto& n : op->params) out << ',' << n;
  out << ",value,std_error,model_hash,version";
  if (o.timing) out << ",wall_time_seconds";
  out << '\n';
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    out << op->name;
    for (double v : tuples[i]) out << ',' << format_double(v);
    out << ',' << format_double(values[i].value) << ','
        << (values[i].std_error ? format_double(*values[i].std_error) : "") << ','
        << hash << ',' << kVersion;
    if (o.timing) out << ',' << format_double(wall);
    out << '\n';
  }
  return kOk;
}

/// `rlevy roots`: the RootSet of X (or Y) at each q.
inline int cmd_roots(const ModelSpec& spec_in, bool of_y,
                     const std::vector<std::string>& params, const RunOptions& o,
                     std::ostream& out) {
  const ModelSpec spec = detail::apply_overrides(spec_in, o);
  const LevyModel m = of_y ? refract(spec.refracted()) : spec.process;
  const auto tuples = expand_grid({"q"}, detail::parse_params(params), {}, "roots");
  const auto sets = detail::evaluate_grid<RootSet>(
      tuples, "roots", {"q"}, o.threads,
      [&](const ParamTuple& t) { return scale_roots(m, t[0]); });
  const std::string hash = model_hash(spec);
  const char* process = of_y ? "Y" : "X";
  if (o.format == Format::json) {
    json doc;
    doc["command"] = "roots";
    doc["process"] = process;
    doc["version"] = kVersion;
    doc["model_hash"] = hash;
    json rows = json::array();
    for (const auto& rs : sets) {
      json r;
      r["q"] = rs.q;
      r["roots"] = rs.roots;
      r["weights"] = rs.weights;
      r["warnings"] = rs.warnings;
      r["model_hash"] = hash;
      r["version"] = kVersion;
      rows.push_back(std::move(r));
    }
    doc["records"] = std::move(rows);
    out << doc.dump(2) << '\n';
    return kOk;
  }
  out << "process,q,index,root,weight,model_hash,version\n";
  for (const auto& rs : sets)
    for (std::size_t i = 0; i < rs.size(); ++i)
      out << process << ',' << format_double(rs.q) << ',' << i + 1 << ','
          << format_double(rs.roots[i]) << ',' << format_double(rs.weights[i])
          << ',' << hash << ',' << kVersion << '\n';
  return kOk;
}

struct TraceRequest {
  std::ostream* sink = nullptr;
  std::size_t max_paths = 10;
};

inline constexpr std::size_t kMaxTracePaths = 1000;

/// `rlevy simulate`: estimates with standard errors and censoring, cross
/// referenced to the analytic value when it is defined.
inline int cmd_simulate(const ModelSpec& spec_in, const std::string& target_name,
                        const std::vector<std::string>& params, const RunOptions& o,
                        std::ostream& out, const TraceRequest& trace = {}) {
  const SimTarget* target = find_sim_target(target_name);
  if (!target)
    throw InputError("unknown simulation target '" + target_name + "'\n" +
                     sim_target_list());
  const ModelSpec spec = detail::apply_overrides(spec_in, o);
  const SimConfig& cfg = spec.simulation;
  const auto tuples =
      expand_grid(target->params, detail::parse_params(params), {}, target->name);
  if (trace.sink && trace.max_paths > kMaxTracePaths)
    throw InputError("--trace-paths is capped at " + std::to_string(kMaxTracePaths));

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<NamedEstimate>> results;
  results.reserve(tuples.size());
  for (const auto& t : tuples) {
    try {
      results.push_back(target->fn(spec, cfg, t));
    } catch (const InputError& e) {
      throw InputError(target->name + "(" + detail::tuple_text(target->params, t) +
                       "): " + e.what());
    } catch (const DomainError& e) {
      throw DomainError(target->name + "(" + detail::tuple_text(target->params, t) +
                        "): " + e.what());
    }
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (trace.sink) {
    // Paths of the first tuple, regenerated from the same engines.
    const auto rm = spec.refracted();
    const auto& t = tuples.front();
    const auto& names = target->params;
    auto param = [&](const char* n, double fallback) {
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return t[i];
      return fallback;
    };
    const double inf = std::numeric_limits<double>::infinity();
    PathSpec ps{param("x", 0.0)};
    if (target->name == "exit" || target->name == "occupation-joint") {
      ps.lower = param("a", -inf);
      ps.upper = param("c", inf);
    } else if (target->name == "ruin" || target->name == "bankruptcy") {
      ps.lower = 0.0;
    } else if (target->name == "reach-up") {
      ps.upper = param("c", inf);
    }
    if (target->name == "parisian") ps.trace_clock_rate = param("q", 0.0);
    const bool pairs = cfg.uses_pairs(rm.x_model());
    *trace.sink << "path,time,level,kind\n";
    const std::size_t n = std::min(trace.max_paths, cfg.n_paths);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t stream = pairs ? i / 2 : i;
      auto motion = path_engine(cfg.seed, stream, 0);
      auto clocks = path_engine(cfg.seed, stream, 1);
      std::vector<PathEvent> events;
      simulate_refracted_path(rm, ps, cfg, motion, clocks, pairs && i % 2 == 1,
                              &events);
      std::stable_sort(events.begin(), events.end(),
                       [](const PathEvent& a, const PathEvent& b) {
                         return a.time < b.time;
                       });
      for (const auto& e : events)
        *trace.sink << i << ',' << format_double(e.time) << ','
                    << (std::isnan(e.level) ? std::string() : format_double(e.level))
                    << ',' << to_string(e.kind) << '\n';
    }
  }

  const std::string hash = model_hash(spec);
  auto z_score = [](const NamedEstimate& ne) -> std::optional<double> {
    if (!ne.analytic || !(ne.estimate.std_error > 0.0)) return std::nullopt;
    return (ne.estimate.mean - *ne.analytic) / ne.estimate.std_error;
  };
  if (o.format == Format::json) {
    json doc;
    doc["command"] = "simulate";
    doc["target"] = target->name;
    doc["version"] = kVersion;
    doc["model_hash"] = hash;
    doc["config"] = {{"paths", cfg.n_paths},
                     {"horizon", cfg.horizon},
                     {"dt", cfg.dt},
                     {"seed", cfg.seed},
                     {"antithetic", cfg.antithetic},
                     {"exact", spec.process.sigma() == 0.0}};
    json rows = json::array();
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      json r;
      r["target"] = target->name;
      r["params"] = detail::params_json(target->params, tuples[i]);
      json ests = json::array();
      for (const auto& ne : results[i]) {
        json e;
        e["quantity"] = ne.quantity;
        e["mean"] = ne.estimate.mean;
        e["std_error"] = ne.estimate.std_error;
        e["n_paths"] = ne.estimate.n_paths;
        e["n_censored"] = ne.estimate.n_censored;
        e["censored_fraction"] = ne.estimate.censored_fraction();
        e["analytic"] = ne.analytic ? json(*ne.analytic) : json(nullptr);
        const auto z = z_score(ne);
        e["z_score"] = z ? json(*z) : json(nullptr);
        ests.push_back(std::move(e));
      }
      r["estimates"] = std::move(ests);
      r["model_hash"] = hash;
      r["version"] = kVersion;
      rows.push_back(std::move(r));
    }
    doc["records"] = std::move(rows);
    if (o.timing) doc["wall_time_seconds"] = wall;
    out << doc.dump(2) << '\n';
    return kOk;
  }
  out << "target";
  for (const auto& n : target->params) out << ',' << n;
  out << ",quantity,mean,std_error,n_paths,n_censored,censored_fraction,analytic,"
         "z_score,seed,model_hash,version";
  if (o.timing) out << ",wall_time_seconds";
  out << '\n';
  for (std::size_t i = 0; i < tuples.size(); ++i)
    for (const auto& ne : results[i]) {
      out << target->name;
      for (double v : tuples[i]) out << ',' << format_double(v);
      const auto z = z_score(ne);
      out << ',' << ne.quantity << ',' << format_double(ne.estimate.mean) << ','
          << format_double(ne.estimate.std_error) << ',' << ne.estimate.n_paths
          << ',' << ne.estimate.n_censored << ','
          << format_double(ne.estimate.censored_fraction()) << ','
          << (ne.analytic ? format_double(*ne.analytic) : "") << ','
          << (z ? format_double(*z) : "") << ',' << cfg.seed << ',' << hash << ','
          << kVersion;
      if (o.timing) out << ',' << format_double(wall);
      out << '\n';
    }
  return kOk;
}

inline json to_json(const VerifyReport& rep) {
  json doc;
  doc["suite"] = to_string(rep.suite);
  doc["passed"] = rep.passed();
  doc["summary"] = {{"passed", rep.count(true)},
                    {"failed", rep.count(false)},
                    {"skipped", rep.skipped()}};
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json j;
    j["group"] = c.group;
    j["name"] = c.name;
    j["status"] = c.skipped ? "skipped" : (c.passed ? "pass" : "fail");
    j["value"] = detail::number_or_null(c.value);
    j["tolerance"] = c.tolerance;
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(std::move(j));
  }
  doc["checks"] = std::move(checks);
  json sign = json::array();
  for (const auto& s : rep.sign) {
    json j;
    j["transform"] = s.label;
    j["query"] = s.query;
    j["implemented_minus"] = s.minus_value;
    j["printed_plus"] = s.plus_value;
    j["plus_in_unit_interval"] = s.plus_in_unit_interval;
    j["minus_q0_reduction_gap"] = s.minus_q0_gap;
    j["plus_q0_reduction_gap"] = s.plus_q0_gap;
    if (s.mc) {
      j["simulated"] = {{"mean", s.mc->mean},
                        {"std_error", s.mc->std_error},
                        {"n_paths", s.mc->n_paths},
                        {"n_censored", s.mc->n_censored}};
      j["minus_z"] = *s.minus_z;
      j["plus_z"] = *s.plus_z;
    } else {
      j["simulated"] = nullptr;
    }
    j["verdict"] = s.verdict;
    j["passed"] = s.passed;
    sign.push_back(std::move(j));
  }
  doc["sign_adjudication"] = std::move(sign);
  return doc;
}

inline void print_summary(const VerifyReport& rep, std::ostream& os) {
  for (const auto& c : rep.checks) {
    os << (c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL")) << "  [" << c.group
       << "] " << c.name;
    if (!c.skipped)
      os << "  (" << format_double(c.value) << " <= " << format_double(c.tolerance)
         << ")";
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  for (const auto& s : rep.sign) {
    os << (s.passed ? "PASS" : "FAIL") << "  [sign] " << s.label << " at " << s.query
       << ": '-' " << format_double(s.minus_value) << ", '+' "
       << format_double(s.plus_value);
    if (s.mc)
      os << ", simulated " << format_double(s.mc->mean) << " +- "
         << format_double(s.mc->std_error);
    os << "  " << s.verdict << '\n';
  }
  os << rep.count(true) << " passed, " << rep.count(false) << " failed, "
     << rep.skipped() << " skipped (" << to_string(rep.suite) << " suite)\n";
}

/// `rlevy verify`: JSON report (or CSV check table) on `out`, human summary
/// on `summary`. Exit code 4 when any check fails.
inline int cmd_verify(const ModelSpec& spec_in, Suite suite, const RunOptions& o,
                      std::ostream& out, std::ostream& summary) {
  const ModelSpec spec = detail::apply_overrides(spec_in, o);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_verify(spec, suite, spec.simulation);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string hash = model_hash(spec);
  if (o.format == Format::json) {
    json doc;
    doc["command"] = "verify";
    doc["version"] = kVersion;
    doc["model_hash"] = hash;
    doc["seed"] = spec.simulation.seed;
    doc["paths"] = spec.simulation.n_paths;
    const json report = to_json(rep);
    for (const auto& [k, v] : report.items()) doc[k] = v;
    if (o.timing) doc["wall_time_seconds"] = wall;
    out << doc.dump(2) << '\n';
  } else {
    out << "group,name,status,value,tolerance,detail,model_hash,version\n";
    for (const auto& c : rep.checks)
      out << c.group << ',' << detail::csv_field(c.name) << ','
          << (c.skipped ? "skipped" : (c.passed ? "pass" : "fail")) << ','
          << format_double(c.value) << ',' << format_double(c.tolerance) << ','
          << detail::csv_field(c.detail) << ',' << hash << ',' << kVersion << '\n';
    for (const auto& s : rep.sign)
      out << "sign," << detail::csv_field(s.label + " at " + s.query) << ','
          << (s.passed ? "pass" : "fail") << ','
          << format_double(s.minus_z.value_or(s.minus_q0_gap)) << ",,"
          << detail::csv_field(s.verdict) << ',' << hash << ',' << kVersion << '\n';
  }
  print_summary(rep, summary);
  return rep.passed() ? kOk : kVerificationFailed;
}

}  // namespace refracted_levy::cli
