#include "ebreg/commands.hpp"

#include "ebreg/diagnostics.hpp"
#include "ebreg/lasso.hpp"
#include "ebreg/oracle.hpp"
#include "ebreg/sampler.hpp"
#include "ebreg/simharness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ebreg {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

json one_based(const Model& model) {
  json out = json::array();
  for (int j : model) out.push_back(j + 1);
  return out;
}

void write_trace(const std::string& path, const std::vector<int>& sizes) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write trace file " + path);
  out << "iteration,size\n";
  for (std::size_t t = 0; t < sizes.size(); ++t) out << t + 1 << ',' << sizes[t] << '\n';
}

struct ChainPlan {
  int iterations;
  int burn_in;
};

ChainPlan chain_plan(const RunConfig& cfg, Index p) {
  ChainPlan plan;
  plan.iterations = cfg.iterations.value_or(default_iterations(p));
  plan.burn_in = cfg.burn_in.value_or(default_burn_in(plan.iterations));
  if (plan.burn_in >= plan.iterations) throw ValidationError("burn-in must be below iterations");
  return plan;
}

CvOptions cv_options(const RunConfig& cfg) {
  CvOptions cv;
  cv.folds = cfg.folds;
  cv.workers = cfg.workers;
  return cv;
}

json metrics_json(const Metrics& m) {
  return json{{"p_bar_0", m.p_bar_0},       {"p_bar_1", m.p_bar_1},
              {"pr_exact", m.pr_exact},     {"pr_contain", m.pr_contain},
              {"fdr", m.fdr},               {"reps_ok", m.reps_ok},
              {"reps_failed", m.reps_failed}, {"mean_sigma2", m.mean_sigma2},
              {"mean_acceptance", m.mean_acceptance}};
}

}  // namespace

Dataset parse_csv(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line))
    if (!trim(line).empty()) {
      header = split_row(line);
      break;
    }
  if (header.empty()) throw MalformedInput("CSV is empty");
  {
    double tmp;
    if (std::all_of(header.begin(), header.end(), [&](const std::string& c) { return parse_number(c, tmp); }))
      throw MalformedInput("CSV needs a header row");
  }
  const std::size_t width = header.size();
  if (width < 2) throw MalformedInput("CSV has no predictor columns");

  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != width)
      throw MalformedInput("line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " cells, got " +
                           std::to_string(cells.size()));
    std::vector<double> row(width);
    for (std::size_t k = 0; k < width; ++k)
      if (!parse_number(cells[k], row[k]))
        throw MalformedInput("line " + std::to_string(line_no) + ", column " + std::to_string(k + 1) +
                             ": not a number: '" + cells[k] + "'");
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw MalformedInput("CSV needs at least two data rows");

  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(width) - 1;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    y(i) = row[0];
    for (Index j = 0; j < p; ++j) X(i, j) = row[static_cast<std::size_t>(j) + 1];
  }
  return Dataset{DesignMatrixd(std::move(X)), std::move(y), std::vector<std::string>(header.begin() + 1, header.end())};
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open input file " + path);
  return parse_csv(in);
}

json cmd_fit(const RunConfig& cfg) {
  cfg.validate();
  const Dataset data = read_csv(cfg.input);
  const DesignMatrixd& X = data.X;
  const Index R = rank_of(X);
  const ModelPrior prior = make_prior(cfg.prior, X, R);
  const ChainPlan plan = chain_plan(cfg, X.p());

  const LassoFit lasso = lasso_cv(X.values(), data.y, cv_options(cfg));
  const Hyperparams h = cfg.hyperparams(cfg.sigma2 ? *cfg.sigma2 : sigma2_from_fit(lasso, X.n()));
  h.validate();

  ChainConfig chain_cfg;
  chain_cfg.iterations = plan.iterations;
  chain_cfg.burn_in = plan.burn_in;
  chain_cfg.seed = derive_seed(cfg.seed, 0);
  chain_cfg.max_size = R;
  chain_cfg.init = lasso_initial_model(lasso, X, data.y, R);
  const ChainOutput chain = run_chain(X, data.y, prior, h, chain_cfg);
  if (!cfg.trace.empty()) write_trace(cfg.trace, chain.trace_sizes);

  const Model selected = median_probability_model(chain.inclusion);
  json inclusion = json::array();
  for (Index j = 0; j < X.p(); ++j)
    inclusion.push_back({{"index", j + 1}, {"name", data.names[static_cast<std::size_t>(j)]},
                         {"probability", chain.inclusion(j)}});

  json names = json::array();
  for (int j : selected) names.push_back(data.names[static_cast<std::size_t>(j)]);
  json coefficients = nullptr;
  try {
    coefficients = json::array();
    const Eigen::VectorXd b = fit_model(X, data.y, selected).sorted_beta();
    for (Index k = 0; k < b.size(); ++k) coefficients.push_back(b(k));
  } catch (const SingularModel&) {
    coefficients = nullptr;
  }

  json top = json::array();
  for (const auto& [model, count] : top_models(chain, static_cast<std::size_t>(cfg.top)))
    top.push_back({{"variables", one_based(model)},
                   {"probability", static_cast<double>(count) / static_cast<double>(chain.retained)}});

  json report;
  report["config"] = to_json(cfg);
  report["n"] = X.n();
  report["p"] = X.p();
  report["rank"] = R;
  report["prior"] = prior.name();
  report["sigma2"] = h.sigma2;
  report["sigma2_source"] = cfg.sigma2 ? "given" : "estimate";
  report["lasso"] = {{"lambda", lasso.lambda}, {"active_size", lasso.active_size},
                     {"initial_model", one_based(chain_cfg.init)}};
  report["iterations"] = plan.iterations;
  report["burn_in"] = plan.burn_in;
  report["seed"] = cfg.seed;
  report["acceptance_rate"] = chain.acceptance_rate;
  report["inclusion"] = inclusion;
  report["median_model"] = {{"variables", one_based(selected)}, {"names", names}, {"coefficients", coefficients}};
  report["top_models"] = top;
  return report;
}

json cmd_simulate(const RunConfig& cfg, std::string* csv_table) {
  cfg.validate();
  const SettingSpec spec = resolve_setting(cfg);
  const ChainPlan plan = chain_plan(cfg, spec.p);

  SimOptions opts;
  opts.iterations = plan.iterations;
  opts.burn_in = plan.burn_in;
  opts.alpha = cfg.alpha;
  opts.gamma = cfg.gamma;
  opts.sigma2 = cfg.sigma2;
  opts.prior = cfg.prior;
  opts.cv.folds = cfg.folds;
  opts.workers = cfg.workers;
  opts.progress = true;
  const SettingResult result = run_setting(spec, opts);
  const Metrics& m = result.metrics;

  json reps = json::array();
  for (std::size_t r = 0; r < result.reps.size(); ++r) {
    const RepRecord& rec = result.reps[r];
    if (rec.ok)
      reps.push_back({{"rep", r + 1}, {"selected", one_based(rec.selected)}, {"sigma2", rec.sigma2_used}});
    else
      reps.push_back({{"rep", r + 1}, {"error", rec.error}});
  }

  json report;
  report["config"] = to_json(cfg);
  report["setting"] = {{"name", spec.name}, {"n", spec.n},       {"p", spec.p},
                       {"rho", spec.rho},   {"reps", spec.reps}, {"support", one_based(spec.s_star_positions)}};
  report["iterations"] = plan.iterations;
  report["burn_in"] = plan.burn_in;
  report["metrics"] = metrics_json(m);
  report["replications"] = reps;

  if (csv_table) {
    std::ostringstream out;
    out << std::setprecision(6);
    out << "setting,n,p,reps,p_bar_0,p_bar_1,pr_exact,pr_contain,fdr,wall_time_s\n";
    out << spec.name << ',' << spec.n << ',' << spec.p << ',' << m.reps_ok << ',' << m.p_bar_0 << ',' << m.p_bar_1
        << ',' << m.pr_exact << ',' << m.pr_contain << ',' << m.fdr << ',' << m.wall_time_s << '\n';
    *csv_table = out.str();
  }
  return report;
}

json cmd_enumerate(const RunConfig& cfg) {
  cfg.validate();
  const Dataset data = read_csv(cfg.input);
  const DesignMatrixd& X = data.X;
  const Index R = rank_of(X);
  const Index smax = cfg.smax < 0 ? R : std::min<Index>(cfg.smax, X.p());
  if (count_models(X.p(), smax) > kEnumerationGuard)
    throw TooLarge("enumeration over " + std::to_string(count_models(X.p(), smax)) + " models exceeds the guard");
  const ModelPrior prior = make_prior(cfg.prior, X, R);
  const double sigma2 = cfg.sigma2 ? *cfg.sigma2 : sigma2_from_fit(lasso_cv(X.values(), data.y, cv_options(cfg)), X.n());
  const Hyperparams h = cfg.hyperparams(sigma2);
  h.validate();
  const ExactPosterior post = enumerate_posterior(X, data.y, prior, h, smax);

  std::vector<std::pair<Model, double>> rows(post.table.begin(), post.table.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  json table = json::array();
  double total = 0.0;
  for (const auto& [model, prob] : rows) {
    total += prob;
    table.push_back({{"variables", one_based(model)},
                     {"probability", prob},
                     {"log_marginal", post.log_marginals.at(model)}});
  }
  json inclusion = json::array();
  for (Index j = 0; j < X.p(); ++j)
    inclusion.push_back({{"index", j + 1}, {"name", data.names[static_cast<std::size_t>(j)]},
                         {"probability", post.inclusion(j)}});

  json report;
  report["config"] = to_json(cfg);
  report["n"] = X.n();
  report["p"] = X.p();
  report["smax"] = smax;
  report["prior"] = prior.name();
  report["sigma2"] = sigma2;
  report["models"] = static_cast<long>(rows.size());
  report["singular_models"] = post.singular_models;
  report["log_normalizer"] = post.log_normalizer;
  report["total_probability"] = total;
  report["inclusion"] = inclusion;
  report["median_model"] = one_based(median_probability_model(post.inclusion));
  report["table"] = table;
  return report;
}

json cmd_diagnose(const RunConfig& cfg) {
  cfg.validate();
  const Hyperparams h = cfg.hyperparams(cfg.sigma2.value_or(1.0));
  h.validate();
  json report;
  report["config"] = to_json(cfg);
  bool all_pass = true;

  {
    const DenominatorBoundSummary s = denominator_bound_suite(derive_seed(cfg.seed, 1), cfg.instances);
    const bool pass = s.passed == s.instances;
    all_pass = all_pass && pass;
    report["denominator_bound"] = {{"instances", s.instances}, {"passed", s.passed}, {"min_log_margin", s.min_margin},
                        {"pass", pass}};
  }

  {
    const RateConstants rc = rate_constants(h);
    report["constants"] = {{"c", denominator_constant(h)}, {"nu", rc.nu},   {"holder", rc.holder},
                           {"q", rc.q},                    {"d", rc.d},     {"phi", rc.phi}};
  }

  {
    RandomSource rng(derive_seed(cfg.seed, 2));
    const KappaSweep k = kappa_sweep(generate_design(20, 10, 0.25, rng));
    all_pass = all_pass && k.non_increasing;
    report["kappa"] = {{"n", 20}, {"p", 10}, {"values", k.values}, {"non_increasing", k.non_increasing},
                       {"pass", k.non_increasing}};
  }

  {
    const NestedChisqSummary c = nested_chisq_suite(derive_seed(cfg.seed, 3), 2000, 0.01);
    all_pass = all_pass && c.pass;
    report["nested_chisq"] = {{"draws", c.draws}, {"df", 2}, {"ks", c.ks}, {"critical_1pct", c.critical},
                              {"pass", c.pass}};
  }

  {
    // Ratio log zeta / (s* log(p / s*)) should stay in a bounded band as p grows.
    const Index s_star = 5;
    json sweeps = json::object();
    bool bounded = true;
    PriorSpec binom;
    binom.family = "binom";
    for (const PriorSpec& ps : {cfg.prior, binom}) {
      json sweep = json::array();
      for (Index p : {100, 1000, 10000}) {
        const Index R = std::min<Index>(p, 100);
        const double lz = log_zeta(make_prior(ps, p, R), s_star, rate_constants(h));
        const double ratio =
            lz / (static_cast<double>(s_star) * std::log(static_cast<double>(p) / static_cast<double>(s_star)));
        bounded = bounded && std::isfinite(lz) && ratio >= 0.5 && ratio <= 3.0;
        sweep.push_back({{"p", p}, {"R", R}, {"log_zeta", lz}, {"ratio", ratio}});
      }
      sweeps[ps.family] = sweep;
    }
    all_pass = all_pass && bounded;
    report["log_zeta"] = {{"s_star", s_star}, {"band", {0.5, 3.0}}, {"sweeps", sweeps}, {"pass", bounded}};
  }

  {
    SettingSpec spec;
    spec.name = "concentration";
    spec.n = 100;
    spec.p = 200;
    spec.sigma2 = h.sigma2;
    RandomSource rng(derive_seed(cfg.seed, 4));
    const DesignMatrixd X = generate_design(spec.n, spec.p, spec.rho, rng);
    const Eigen::VectorXd y = generate_response(X, spec, rng);
    const Index R = rank_of(X);
    const ModelPrior prior = make_prior(cfg.prior, X, R);
    const LassoFit lasso = lasso_cv(X.values(), y, cv_options(cfg));

    ChainConfig chain_cfg;
    chain_cfg.iterations = cfg.iterations.value_or(default_iterations(spec.p));
    chain_cfg.burn_in = cfg.burn_in.value_or(default_burn_in(chain_cfg.iterations));
    chain_cfg.seed = rng();
    chain_cfg.max_size = R;
    chain_cfg.init = lasso_initial_model(lasso, X, y, R);
    chain_cfg.record_models = true;
    const ChainOutput chain = run_chain(X, y, prior, h, chain_cfg);
    if (!cfg.trace.empty()) write_trace(cfg.trace, chain.trace_sizes);

    const auto draws = posterior_beta_draws(X, y, chain, h, rng);
    const double M = 10.0;
    const double s = static_cast<double>(spec.s_star_positions.size());
    Thresholds t;
    t.eps = M * s * std::log(static_cast<double>(spec.p) / s) * h.sigma2;
    t.delta = t.eps / (0.25 * static_cast<double>(spec.n));
    t.Delta = 3.0 * s;
    const ConcentrationMasses masses = concentration_diagnostic(draws, X, spec.beta_star(), t);
    const double limit = 0.05;
    const bool pass = masses.mass_pred <= limit && masses.mass_l2 <= limit && masses.mass_dim <= limit;
    all_pass = all_pass && pass;
    report["concentration"] = {{"n", spec.n},
                               {"p", spec.p},
                               {"M", M},
                               {"thresholds", {{"eps", t.eps}, {"delta", t.delta}, {"Delta", t.Delta}}},
                               {"mass_pred", masses.mass_pred},
                               {"mass_l2", masses.mass_l2},
                               {"mass_dim", masses.mass_dim},
                               {"limit", limit},
                               {"draws", static_cast<long>(draws.size())},
                               {"pass", pass}};
  }

  report["pass"] = all_pass;
  return report;
}

json run_command(const RunConfig& cfg, std::string* csv_table) {
  if (cfg.command == "fit") return cmd_fit(cfg);
  if (cfg.command == "simulate") return cmd_simulate(cfg, csv_table);
  if (cfg.command == "enumerate") return cmd_enumerate(cfg);
  if (cfg.command == "diagnose") return cmd_diagnose(cfg);
  throw ValidationError("unknown command '" + cfg.command + "'");
}

std::string render_report(const json& report) { return report.dump(2) + "\n"; }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const MalformedInput*>(&e) ||
      dynamic_cast<const TooLarge*>(&e))
    return kExitValidation;
  return kExitNumeric;
}

}  // namespace ebreg
