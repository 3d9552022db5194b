#include <doctest.h>

#include "ebreg/commands.hpp"
#include "ebreg/types.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

using namespace ebreg;
using nlohmann::json;

namespace {

const std::string kCli = EBREG_CLI_PATH;

std::string temp_path(const std::string& name) { return std::string(P_tmpdir) + "/ebreg_test_cli_" + name; }

int run(const std::string& args) {
  const std::string cmd = "\"" + kCli + "\" " + args + " 2>" + temp_path("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) { return json::parse(slurp(path)); }

// y = coef . x + noise, written with full precision.
std::string make_csv(const std::string& name, Index n, Index p, const std::vector<double>& coef, std::uint64_t seed) {
  RandomSource rng(seed);
  std::ostringstream out;
  out << std::setprecision(17) << "y";
  for (Index j = 0; j < p; ++j) out << ",x" << j + 1;
  out << '\n';
  for (Index i = 0; i < n; ++i) {
    std::vector<double> x(static_cast<std::size_t>(p));
    double y = standard_normal(rng);
    for (Index j = 0; j < p; ++j) {
      x[static_cast<std::size_t>(j)] = standard_normal(rng);
      if (j < static_cast<Index>(coef.size())) y += coef[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    }
    out << y;
    for (double v : x) out << ',' << v;
    out << '\n';
  }
  const std::string path = temp_path(name);
  std::ofstream(path) << out.str();
  return path;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("--help >/dev/null") == 0);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("simulate --reps 0") == 2);
  CHECK(run("simulate --preset 4") == 2);
  CHECK(run("fit --prior horseshoe --input x.csv") == 2);
  CHECK(run("fit --alpha 1.5 --input x.csv") == 2);
  CHECK(run("fit") == 2);
  CHECK(run("fit --input " + temp_path("does_not_exist.csv")) == 2);
  CHECK(run("simulate --sigma2 1 --estimate-sigma2") == 2);

  const std::string no_predictors = temp_path("p0.csv");
  std::ofstream(no_predictors) << "y\n1\n2\n3\n";
  CHECK(run("fit --input " + no_predictors) == 2);
  std::remove(no_predictors.c_str());

  const std::string big = make_csv("big.csv", 30, 25, {1.0}, 1);
  CHECK(run("enumerate --input " + big + " --smax 25 >/dev/null") == 2);
  std::remove(big.c_str());
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ValidationError("x")) == kExitValidation);
  CHECK(exit_code_for(MalformedInput("x")) == kExitValidation);
  CHECK(exit_code_for(TooLarge("x")) == kExitValidation);
  CHECK(exit_code_for(DegenerateFit("x")) == kExitNumeric);
  CHECK(exit_code_for(NonConvergence("x")) == kExitNumeric);
  CHECK(exit_code_for(InitSingular("x")) == kExitNumeric);
  CHECK(exit_code_for(SingularModel("x")) == kExitNumeric);
  CHECK(exit_code_for(DivideByZero("x")) == kExitNumeric);
  CHECK(kExitValidation == 2);
  CHECK(kExitNumeric == 3);
}

TEST_CASE("fit on a toy file agrees with enumeration") {
  const std::string csv = make_csv("toy.csv", 10, 3, {2.0}, 2);
  const std::string fit_out = temp_path("fit.json");
  const std::string enum_out = temp_path("enum.json");
  const std::string trace = temp_path("trace.csv");
  REQUIRE(run("fit --input " + csv + " --seed 3 --output " + fit_out + " --trace " + trace) == 0);
  REQUIRE(run("enumerate --input " + csv + " --output " + enum_out) == 0);
  const json fit = read_json(fit_out);
  const json ex = read_json(enum_out);
  CHECK(fit.at("median_model").at("variables") == json::array({1}));
  CHECK(ex.at("median_model") == json::array({1}));
  CHECK(fit.at("median_model").at("names") == json::array({"x1"}));
  CHECK(fit.at("median_model").at("coefficients").at(0).get<double>() == doctest::Approx(2.0).epsilon(0.3));
  CHECK(fit.at("iterations") == 5000);
  CHECK(fit.at("burn_in") == 1000);
  CHECK(fit.at("inclusion").size() == 3);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(std::abs(fit.at("inclusion")[j].at("probability").get<double>() -
                   ex.at("inclusion")[j].at("probability").get<double>()) < 0.05);
  CHECK(fit.at("config").at("command") == "fit");

  // The trace has one line per iteration after the header.
  std::ifstream t(trace);
  std::string line;
  int lines = 0;
  while (std::getline(t, line)) ++lines;
  CHECK(lines == 5001);

  // Re-running from the report reproduces it byte for byte.
  const std::string again = temp_path("fit2.json");
  REQUIRE(run("fit --config " + fit_out + " --output " + again) == 0);
  CHECK(slurp(again) == slurp(fit_out));
  // Flags override the embedded config.
  REQUIRE(run("fit --config " + fit_out + " --seed 4 --output " + again) == 0);
  CHECK(read_json(again).at("seed") == 4);

  for (const std::string& f : {csv, fit_out, enum_out, trace, again}) std::remove(f.c_str());
}

TEST_CASE("enumerate writes the whole table") {
  const std::string csv = make_csv("p10.csv", 30, 10, {1.5, -1.0}, 3);
  const std::string out = temp_path("enum10.json");
  REQUIRE(run("enumerate --input " + csv + " --output " + out) == 0);
  const json ex = read_json(out);
  CHECK(ex.at("models") == 1024);
  REQUIRE(ex.at("table").size() == 1024);
  double total = 0.0, previous = 1.0;
  for (const json& row : ex.at("table")) {
    const double prob = row.at("probability").get<double>();
    total += prob;
    CHECK(prob <= previous);
    previous = prob;
  }
  CHECK(std::abs(total - 1.0) <= 1e-10);
  CHECK(ex.at("table")[0].at("variables") == json::array({1, 2}));
  std::remove(csv.c_str());
  std::remove(out.c_str());
}

TEST_CASE("diagnose") {
  const std::string out = temp_path("diag.json");
  REQUIRE(run("diagnose --output " + out) == 0);
  const json d = read_json(out);
  CHECK(d.at("denominator_bound").at("instances") == 100);
  CHECK(d.at("denominator_bound").at("passed") == 100);
  CHECK(d.at("constants").at("c").get<double>() == doctest::Approx(0.5 * std::log(1000.0)));
  CHECK(d.at("nested_chisq").at("pass") == true);
  CHECK(d.at("kappa").at("non_increasing") == true);
  CHECK(d.at("log_zeta").at("pass") == true);
  CHECK(d.at("concentration").at("pass") == true);
  CHECK(d.at("pass") == true);
  std::remove(out.c_str());
}

TEST_CASE("simulate") {
  const std::string out = temp_path("sim.json");
  const std::string csv = temp_path("sim.csv");
  REQUIRE(run("simulate --preset 3 --reps 2 --seed 7 --output " + out + " --csv " + csv) == 0);
  std::ifstream table(csv);
  std::string header, row;
  std::getline(table, header);
  std::getline(table, row);
  CHECK(header == "setting,n,p,reps,p_bar_0,p_bar_1,pr_exact,pr_contain,fdr,wall_time_s");
  CHECK(row.rfind("setting3,100,500,2,", 0) == 0);
  const json sim = read_json(out);
  CHECK(sim.at("replications").size() == 2);
  CHECK(sim.at("setting").at("support") == json::array({1, 2, 3, 4, 5}));
  CHECK_FALSE(sim.at("metrics").contains("wall_time_s"));

  // Worker count, from the flag or the environment, leaves the bytes alone.
  const std::string a = temp_path("sim_a.json"), b = temp_path("sim_b.json");
  REQUIRE(run("simulate --preset 1 --reps 3 --seed 9 --workers 1 --output " + a) == 0);
  REQUIRE(run("simulate --preset 1 --reps 3 --seed 9 --workers 3 --output " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  const std::string env = "EBREG_WORKERS=2 \"" + kCli + "\" simulate --preset 1 --reps 3 --seed 9 --output " + b + " 2>/dev/null";
  REQUIRE(std::system(env.c_str()) == 0);
  CHECK(slurp(a) == slurp(b));

  for (const std::string& f : {out, csv, a, b}) std::remove(f.c_str());
}
