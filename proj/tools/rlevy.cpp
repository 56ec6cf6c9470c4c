// rlevy: command-line front end for the refracted_levy library.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "refracted_levy/cli/commands.hpp"

namespace cli = refracted_levy::cli;

int main(int argc, char** argv) {
  CLI::App app{"Refracted Levy risk processes: scale functions, occupation "
               "times, ruin, and a Monte Carlo oracle"};
  app.set_version_flag("--version", std::string(refracted_levy::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string model_path;
  std::string out_path;
  std::string format = "csv";
  std::vector<std::string> params;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> tol;
  std::optional<double> horizon;
  std::optional<double> dt;
  bool antithetic = false;
  unsigned threads = 0;
  bool timing = false;

  app.add_option("--model", model_path, "model file (YAML or JSON)")
      ->required();
  app.add_option("--out", out_path, "write the result here instead of stdout");
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--param", params,
                 "name=value, name=v1,v2,... or name=linspace(lo,hi,n); "
                 "repeatable, grids form a cartesian product")
      ->delimiter(';');
  app.add_option("--seed", seed, "simulation seed (u64)");
  app.add_option("--paths", paths, "number of simulated paths")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "quadrature tolerance (absolute and relative)");
  app.add_option("--horizon", horizon, "simulation horizon");
  app.add_option("--dt", dt, "Euler step for sigma > 0");
  app.add_flag("--antithetic", antithetic, "antithetic Gaussian increments");
  app.add_option("--threads", threads, "worker threads (0: all cores)");
  app.add_flag("--timing", timing, "include wall time in the output");

  auto* eval = app.add_subcommand("eval", "evaluate an analytic operation on a grid");
  std::string operation;
  eval->add_option("operation", operation, "operation name")->required();
  eval->footer(cli::operation_list());

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a target");
  std::string target;
  std::string trace_path;
  std::size_t trace_paths = 10;
  simulate->add_option("target", target, "simulation target")->required();
  simulate->add_option("--trace", trace_path, "write per-path event lists (CSV)");
  simulate->add_option("--trace-paths", trace_paths, "paths to trace (max 1000)");
  simulate->footer(cli::sim_target_list());

  auto* verify = app.add_subcommand("verify", "run the identity and oracle suite");
  std::string suite = "full";
  verify->add_option("--suite", suite, "quick (analytic only) or full")
      ->check(CLI::IsMember({"quick", "full"}));

  auto* roots = app.add_subcommand("roots", "dump the roots and weights of W^(q)");
  bool of_y = false;
  roots->add_flag("--refracted", of_y, "use Y = X - alpha t instead of X");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (app.got_subcommand(eval) && operation.empty())
      std::cerr << cli::operation_list();
    return cli::kInputError;
  }

  try {
    cli::RunOptions o;
    o.format = format == "json" ? cli::Format::json : cli::Format::csv;
    o.seed = seed;
    o.paths = paths;
    o.tol = tol;
    o.horizon = horizon;
    o.dt = dt;
    if (antithetic) o.antithetic = true;
    o.threads = threads;
    o.timing = timing;

    const auto spec = cli::load_model_spec(model_path);
    std::unique_ptr<std::ofstream> file;
    if (!out_path.empty()) {
      file = std::make_unique<std::ofstream>(out_path, std::ios::binary);
      if (!*file)
        throw refracted_levy::InputError("cannot write '" + out_path + "'");
    }
    std::ostream& out = file ? *file : std::cout;

    if (app.got_subcommand(eval)) return cli::cmd_eval(spec, operation, params, o, out);
    if (app.got_subcommand(roots)) return cli::cmd_roots(spec, of_y, params, o, out);
    if (app.got_subcommand(verify))
      return cli::cmd_verify(spec, suite == "quick" ? cli::Suite::quick : cli::Suite::full,
                             o, out, std::cerr);
    cli::TraceRequest trace;
    std::unique_ptr<std::ofstream> trace_file;
    if (!trace_path.empty()) {
      trace_file = std::make_unique<std::ofstream>(trace_path, std::ios::binary);
      if (!*trace_file)
        throw refracted_levy::InputError("cannot write '" + trace_path + "'");
      trace.sink = trace_file.get();
      trace.max_paths = trace_paths;
    }
    return cli::cmd_simulate(spec, target, params, o, out, trace);
  } catch (const std::exception& e) {
    std::cerr << "rlevy: " << e.what() << '\n';
    return cli::exit_code_for(e);
  }
}
