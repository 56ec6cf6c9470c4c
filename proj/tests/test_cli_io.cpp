#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "refracted_levy/cli/commands.hpp"

using namespace refracted_levy;
using namespace refracted_levy::cli;

namespace {

const std::string kSamples = RLEVY_SAMPLES_DIR;

const char* kCl = R"(process:
  drift: 1.5
  jump_rate: 1
  jumps:
    - {weight: 1, rate: 1}
refraction:
  alpha: 0.25
  b: 1
)";

std::string message_of(const std::string& text) {
  try {
    parse_model_spec(text, "m.yaml");
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

#ifdef RLEVY_EXECUTABLE
struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs rlevy with stdout and stderr captured through temporary files.
Run rlevy(const std::string& args) {
  namespace fs = std::filesystem;
  static int counter = 0;
  const auto dir = fs::temp_directory_path();
  const auto tag = std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const auto out_path = dir / ("rlevy_out_" + tag);
  const auto err_path = dir / ("rlevy_err_" + tag);
  const std::string cmd = std::string("\"") + RLEVY_EXECUTABLE + "\" " + args + " >\"" +
                          out_path.string() + "\" 2>\"" + err_path.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() /
                 (std::to_string(::getpid()) + "_" + name);
  std::ofstream(p) << text;
  return p.string();
}
#endif

}  // namespace

TEST(ModelSpec, ParseEmitRoundTrip) {
  for (const char* file : {"cramer_lundberg.yaml", "brownian.yaml", "hyperexponential.json"}) {
    const auto spec = load_model_spec(kSamples + "/" + file);
    const auto text = emit_model_spec(spec);
    const auto again = parse_model_spec(text);
    EXPECT_EQ(again, spec) << file;
    EXPECT_EQ(emit_model_spec(again), text);
    EXPECT_EQ(model_hash(again), model_hash(spec));
  }
}

TEST(ModelSpec, JsonIsAccepted) {
  const auto spec = load_model_spec(kSamples + "/hyperexponential.json");
  EXPECT_EQ(spec.process.drift(), 2.0);
  EXPECT_EQ(spec.process.sigma(), 0.5);
  ASSERT_EQ(spec.process.jumps().terms().size(), 2u);
  EXPECT_EQ(spec.process.jumps().terms()[1].rate, 3.0);
  ASSERT_TRUE(spec.refraction);
  EXPECT_EQ(spec.refraction->b, 2.0);
}

TEST(ModelSpec, ErrorsNameFileAndLine) {
  const auto unknown = message_of("process:\n  drift: 1\n  sigmaa: 1\n");
  EXPECT_NE(unknown.find("m.yaml:3"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("unknown key 'sigmaa'"), std::string::npos) << unknown;

  const auto bad_value = message_of("process:\n  drift: fast\n");
  EXPECT_NE(bad_value.find("m.yaml:2"), std::string::npos) << bad_value;

  const auto syntax = message_of("process:\n  drift: [1\n");
  EXPECT_NE(syntax.find("m.yaml:"), std::string::npos) << syntax;
  EXPECT_NE(syntax.find("syntax error"), std::string::npos) << syntax;

  const auto missing = message_of("refraction: {alpha: 0.1, b: 1}\n");
  EXPECT_NE(missing.find("'process'"), std::string::npos) << missing;
}

TEST(ModelSpec, RefractionMustStayBelowDrift) {
  const auto msg = message_of(
      "process: {drift: 1.5, jump_rate: 1, jumps: [{weight: 1, rate: 1}]}\n"
      "refraction:\n  alpha: 2\n  b: 1\n");
  EXPECT_NE(msg.find("0 < alpha < c"), std::string::npos) << msg;
  EXPECT_NE(msg.find("m.yaml:"), std::string::npos) << msg;
}

TEST(Grid, LinspaceAndProducts) {
  const auto axis = parse_param("x=linspace(0,1,11)");
  ASSERT_EQ(axis.values.size(), 11u);
  EXPECT_EQ(axis.values.front(), 0.0);
  EXPECT_EQ(axis.values.back(), 1.0);
  const auto tuples = expand_grid({"q", "x"}, {axis, parse_param("q=0,0.5")}, {}, "op");
  ASSERT_EQ(tuples.size(), 22u);
  EXPECT_EQ(tuples[11][0], 0.5);
  EXPECT_THROW(parse_param("x=linspace(0,1)"), InputError);
  EXPECT_THROW(parse_param("x"), InputError);
  EXPECT_THROW(expand_grid({"q"}, {parse_param("z=1")}, {}, "op"), InputError);
  EXPECT_THROW(expand_grid({"q"}, {}, {}, "op"), InputError);
}

TEST(Eval, GridRowsAndColumns) {
  const auto spec = parse_model_spec(kCl);
  std::ostringstream out;
  RunOptions o;
  o.threads = 1;
  EXPECT_EQ(cmd_eval(spec, "scale-W", {"q=0", "x=linspace(0,2,11)"}, o, out), kOk);
  const auto text = out.str();
  EXPECT_EQ(count_lines(text), 12);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "operation,q,x,value,std_error,model_hash,version");
  // The row at x = 0 carries W(0) = 1/c.
  EXPECT_NE(text.find("scale-W,0,0," + format_double(1.0 / 1.5) + ","), std::string::npos);
}

TEST(Eval, JsonRecordsMatchCsvValues) {
  const auto spec = parse_model_spec(kCl);
  RunOptions o;
  o.format = Format::json;
  std::ostringstream out;
  cmd_eval(spec, "ruin-U", {"x=0.5,1,2"}, o, out);
  const auto doc = nlohmann::json::parse(out.str());
  ASSERT_EQ(doc["records"].size(), 3u);
  EXPECT_EQ(doc["records"][2]["params"]["x"], 2.0);
  EXPECT_EQ(doc["records"][2]["value"].get<double>(),
            ruin_prob_U(spec.refracted(), 2.0));
  EXPECT_EQ(doc["model_hash"], model_hash(spec));
}

TEST(Eval, ErrorsMapToExitCodes) {
  const auto spec = parse_model_spec(kCl);
  std::ostringstream out;
  RunOptions o;
  try {
    cmd_eval(spec, "no-such-op", {}, o, out);
    FAIL() << "no error";
  } catch (const InputError& e) {
    EXPECT_EQ(exit_code_for(e), kInputError);
    EXPECT_NE(std::string(e.what()).find("scale-W"), std::string::npos);
  }
  try {
    cmd_eval(spec, "phi", {"q=-1"}, o, out);
    FAIL() << "no error";
  } catch (const DomainError& e) {
    EXPECT_EQ(exit_code_for(e), kDomainError);
    EXPECT_NE(std::string(e.what()).find("q=-1"), std::string::npos);
  }
}

TEST(Verify, QuickSuitePasses) {
  const auto spec = load_model_spec(kSamples + "/cramer_lundberg.yaml");
  std::ostringstream out, summary;
  RunOptions o;
  o.format = Format::json;
  EXPECT_EQ(cmd_verify(spec, Suite::quick, o, out, summary), kOk) << summary.str();
  const auto doc = nlohmann::json::parse(out.str());
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_EQ(doc["summary"]["failed"], 0);
}

TEST(Simulate, OverridesRecordedAndBytesReproducible) {
  const auto spec = load_model_spec(kSamples + "/cramer_lundberg.yaml");
  RunOptions o;
  o.paths = 2000;
  o.seed = 99;
  o.threads = 1;
  std::ostringstream a;
  cmd_simulate(spec, "ruin", {"x=1"}, o, a);
  o.threads = 4;
  std::ostringstream b;
  cmd_simulate(spec, "ruin", {"x=1"}, o, b);
  EXPECT_EQ(a.str(), b.str());
  const auto row = a.str().substr(a.str().find('\n') + 1);
  EXPECT_NE(row.find(",2000,"), std::string::npos) << row;
  EXPECT_NE(row.find(",99,"), std::string::npos) << row;
}

#ifdef RLEVY_EXECUTABLE
TEST(Rlevy, ExitCodes) {
  const std::string cl = "--model \"" + kSamples + "/cramer_lundberg.yaml\" ";
  auto ok = rlevy(cl + "eval scale-W --param q=0 --param 'x=linspace(0,1,11)'");
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(count_lines(ok.out), 12);

  auto unknown = rlevy(cl + "eval nothing");
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("unknown operation"), std::string::npos) << unknown.err;

  auto domain = rlevy(cl + "eval phi --param q=-1");
  EXPECT_EQ(domain.code, 3) << domain.err;

  const auto bad = write_temp("bad_alpha.yaml",
                              "process: {drift: 1.5, jump_rate: 1, jumps: "
                              "[{weight: 1, rate: 1}]}\nrefraction:\n  alpha: 1.5\n  b: 1\n");
  auto alpha = rlevy("--model \"" + bad + "\" eval ruin-U --param x=1");
  EXPECT_EQ(alpha.code, 2);
  EXPECT_NE(alpha.err.find("0 < alpha < c"), std::string::npos) << alpha.err;
  std::filesystem::remove(bad);

  auto no_model = rlevy("eval mean");
  EXPECT_EQ(no_model.code, 2);
}

TEST(Rlevy, SimulateBytesIndependentOfThreads) {
  const std::string base = "--model \"" + kSamples +
                           "/cramer_lundberg.yaml\" --paths 4000 --seed 3 ";
  const auto one = rlevy(base + "--threads 1 simulate parisian --param q=0.5 --param x=1.2");
  const auto many = rlevy(base + "--threads 8 simulate parisian --param q=0.5 --param x=1.2");
  EXPECT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, many.out);
  EXPECT_FALSE(one.out.empty());
}

TEST(Rlevy, VerifyQuick) {
  const auto r = rlevy("--model \"" + kSamples + "/cramer_lundberg.yaml\" --format json "
                       "verify --suite quick");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("0 failed"), std::string::npos) << r.err;
}
#endif
