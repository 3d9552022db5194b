// ebreg command-line driver: fit | simulate | enumerate | diagnose.

#include "ebreg/commands.hpp"
#include "ebreg/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ebreg::ValidationError("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Bayes sparse linear regression"};
  app.require_subcommand(1);

  std::string config_path;
  double alpha = 0, gamma = 0, sigma2 = 0, a = 0, c = 0, r = 0;
  std::string prior, base, input, output, csv, trace;
  int iterations = 0, burn_in = 0, workers = 1, preset = 1, reps = 0, folds = 0, smax = 0, top = 0, instances = 0;
  std::uint64_t seed = 0;

  auto* o_config = app.add_option("--config", config_path, "JSON config file or an earlier report");
  auto* o_alpha = app.add_option("--alpha", alpha, "likelihood fraction in (0, 1)");
  auto* o_gamma = app.add_option("--gamma", gamma, "conditional prior precision");
  auto* o_sigma2 = app.add_option("--sigma2", sigma2, "error variance (plug-in)");
  auto* o_est = app.add_flag("--estimate-sigma2", "estimate the error variance from the lasso fit");
  o_sigma2->excludes(o_est);
  auto* o_prior =
      app.add_option("--prior", prior, "size prior")->check(CLI::IsMember({"complexity", "betabinom", "binom", "mixture"}));
  auto* o_a = app.add_option("--a", a, "prior parameter a");
  auto* o_c = app.add_option("--c", c, "complexity prior parameter c");
  auto* o_r = app.add_option("--r", r, "mixture rate, weight exp(-r R)");
  auto* o_base = app.add_option("--base", base, "mixture base family")
                     ->check(CLI::IsMember({"complexity", "betabinom", "binom"}));
  auto* o_iter = app.add_option("--iterations", iterations, "MCMC iterations (default max(5000, 10 p))");
  auto* o_burn = app.add_option("--burn-in", burn_in, "discarded iterations (default 20%)");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_workers = app.add_option("--workers", workers, "worker threads")->envname("EBREG_WORKERS");
  auto* o_input = app.add_option("--input", input, "CSV: header row, response first");
  auto* o_output = app.add_option("--output", output, "report path (default stdout)");
  auto* o_csv = app.add_option("--csv", csv, "simulate: metrics table path");
  auto* o_trace = app.add_option("--trace", trace, "fit/diagnose: model size trace CSV");
  auto* o_preset = app.add_option("--preset", preset, "simulation setting 1, 2 or 3");
  auto* o_reps = app.add_option("--reps", reps, "simulation replications");
  auto* o_folds = app.add_option("--folds", folds, "cross-validation folds");
  auto* o_smax = app.add_option("--smax", smax, "enumerate: largest model size");
  auto* o_top = app.add_option("--top", top, "fit: visited models to report");
  auto* o_inst = app.add_option("--instances", instances, "diagnose: random D_n bound instances");

  std::string command;
  for (const char* name : {"fit", "simulate", "enumerate", "diagnose"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->callback([&command, name] { command = name; });
  }
  app.get_subcommand("fit")->description("run the sampler on a CSV dataset");
  app.get_subcommand("simulate")->description("replicate a synthetic setting and report selection metrics");
  app.get_subcommand("enumerate")->description("exact posterior over all small models of a CSV dataset");
  app.get_subcommand("diagnose")->description("oracle checks on synthetic problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ebreg::kExitOk : ebreg::kExitValidation;
  }

  try {
    ebreg::RunConfig cfg = o_config->count() ? ebreg::load_config(config_path) : ebreg::RunConfig{};
    cfg.command = command;
    if (o_alpha->count()) cfg.alpha = alpha;
    if (o_gamma->count()) cfg.gamma = gamma;
    if (o_sigma2->count()) cfg.sigma2 = sigma2;
    if (o_est->count()) cfg.sigma2.reset();
    if (o_prior->count()) cfg.prior.family = prior;
    if (o_a->count()) cfg.prior.a = a;
    if (o_c->count()) cfg.prior.c = c;
    if (o_r->count()) cfg.prior.r = r;
    if (o_base->count()) cfg.prior.base = base;
    if (o_iter->count()) cfg.iterations = iterations;
    if (o_burn->count()) cfg.burn_in = burn_in;
    if (o_seed->count()) cfg.seed = seed;
    if (o_workers->count()) cfg.workers = workers;
    if (o_input->count()) cfg.input = input;
    if (o_output->count()) cfg.output = output;
    if (o_csv->count()) cfg.csv = csv;
    if (o_trace->count()) cfg.trace = trace;
    if (o_preset->count()) {
      cfg.preset = preset;
      cfg.setting.reset();
    }
    if (o_reps->count()) cfg.reps = reps;
    if (o_folds->count()) cfg.folds = folds;
    if (o_smax->count()) cfg.smax = smax;
    if (o_top->count()) cfg.top = top;
    if (o_inst->count()) cfg.instances = instances;
    cfg.validate();

    std::string table;
    const nlohmann::json report = ebreg::run_command(cfg, &table);
    write_text(cfg.output, ebreg::render_report(report));
    if (!cfg.csv.empty() && !table.empty()) write_text(cfg.csv, table);
    if (cfg.command == "diagnose" && !report.at("pass").get<bool>()) std::cerr << "diagnose: some checks failed\n";
    return ebreg::kExitOk;
  } catch (const std::exception& e) {
    const int code = ebreg::exit_code_for(e);
    std::cerr << (code == ebreg::kExitValidation ? "error: " : "numeric failure: ") << e.what() << '\n';
    return code;
  }
}
