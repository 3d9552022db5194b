#include "ebreg/simharness.hpp"

#include "ebreg/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <mutex>
#include <thread>

namespace ebreg {

void SettingSpec::validate() const {
  if (n < 1 || p < 1) throw ValidationError("setting needs n >= 1 and p >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("rho must lie in [0, 1)");
  if (beta_star_values.size() != s_star_positions.size())
    throw ValidationError("beta_star_values and s_star_positions differ in length");
  if (canonical(s_star_positions) != s_star_positions)
    throw ValidationError("s_star_positions must be sorted without repeats");
  for (int j : s_star_positions)
    if (j < 0 || j >= p) throw ValidationError("s_star position out of range");
  if (static_cast<Index>(s_star_positions.size()) > n) throw ValidationError("s* must not exceed n");
  if (!(sigma2 >= 0.0)) throw ValidationError("sigma2 must be non-negative");
  if (reps < 1) throw ValidationError("reps must be positive");
}

Eigen::VectorXd SettingSpec::beta_star() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
  for (std::size_t k = 0; k < s_star_positions.size(); ++k) out(s_star_positions[k]) = beta_star_values[k];
  return out;
}

SettingSpec preset_setting(int preset) {
  SettingSpec spec;
  spec.reps = 200;
  switch (preset) {
    case 1:
      spec.name = "setting1";
      spec.n = 100;
      spec.p = 500;
      spec.beta_star_values = {0.6, 1.2, 1.8, 2.4, 3.0};
      break;
    case 2:
      spec.name = "setting2";
      spec.n = 200;
      spec.p = 1000;
      spec.beta_star_values = {0.6, 1.2, 1.8, 2.4, 3.0};
      break;
    case 3:
      spec.name = "setting3";
      spec.n = 100;
      spec.p = 500;
      spec.beta_star_values = {0.6, 0.6, 0.6, 0.6, 0.6};
      break;
    default:
      throw ValidationError("preset must be 1, 2 or 3");
  }
  return spec;
}

DesignMatrixd generate_design(Index n, Index p, double rho, RandomSource& rng) {
  if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("rho must lie in [0, 1)");
  const double shared = std::sqrt(rho);
  const double own = std::sqrt(1.0 - rho);
  Eigen::MatrixXd values(n, p);
  for (Index i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    for (Index j = 0; j < p; ++j) values(i, j) = shared * z + own * standard_normal(rng);
  }
  return DesignMatrixd(std::move(values));
}

Eigen::VectorXd generate_response(const DesignMatrixd& X, const SettingSpec& spec, RandomSource& rng) {
  if (X.p() != spec.p || X.n() != spec.n) throw ValidationError("design does not match the setting");
  Eigen::VectorXd y = X.values() * spec.beta_star();
  const double sd = std::sqrt(spec.sigma2);
  for (Index i = 0; i < y.size(); ++i) y(i) += sd * standard_normal(rng);
  return y;
}

SelectionRecord evaluate_selection(const Model& S_hat, const Model& S_star, const Eigen::VectorXd& inclusion) {
  SelectionRecord rec;
  const Index p = inclusion.size();
  const Index s_star = static_cast<Index>(S_star.size());
  double in_sum = 0.0, out_sum = 0.0;
  for (Index j = 0; j < p; ++j) (contains(S_star, static_cast<int>(j)) ? in_sum : out_sum) += inclusion(j);
  rec.p_bar_1 = s_star > 0 ? in_sum / static_cast<double>(s_star) : 0.0;
  rec.p_bar_0 = p > s_star ? out_sum / static_cast<double>(p - s_star) : 0.0;
  rec.exact = S_hat == S_star;
  rec.contain = is_subset(S_star, S_hat);
  long false_pos = 0;
  for (int j : S_hat)
    if (!contains(S_star, j)) ++false_pos;
  rec.fdr = static_cast<double>(false_pos) / static_cast<double>(std::max<std::size_t>(S_hat.size(), 1));
  return rec;
}

void SimOptions::validate() const {
  if (iterations < 1) throw ValidationError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw ValidationError("burn-in must lie in [0, iterations)");
  Hyperparams{alpha, gamma, sigma2.value_or(1.0)}.validate();
  prior.validate();
  if (workers < 1) throw ValidationError("workers must be positive");
  if (cv.folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
}

RepRecord run_replication(const SettingSpec& spec, const SimOptions& opts, int rep) {
  RepRecord rec;
  RandomSource rng(derive_seed(spec.seed, static_cast<std::uint64_t>(rep)));
  try {
    const DesignMatrixd X = generate_design(spec.n, spec.p, spec.rho, rng);
    const Eigen::VectorXd y = generate_response(X, spec, rng);
    const Index R = rank_of(X);
    const ModelPrior prior = make_prior(opts.prior, X, R);

    CvOptions cv = opts.cv;
    cv.workers = 1;
    const LassoFit lasso = lasso_cv(X.values(), y, cv);
    Hyperparams h{opts.alpha, opts.gamma, opts.sigma2 ? *opts.sigma2 : sigma2_from_fit(lasso, X.n())};
    h.validate();

    ChainConfig cfg;
    cfg.iterations = opts.iterations;
    cfg.burn_in = opts.burn_in;
    cfg.seed = rng();
    cfg.max_size = R;
    cfg.init = lasso_initial_model(lasso, X, y, R);
    const ChainOutput chain = run_chain(X, y, prior, h, cfg);

    rec.selected = median_probability_model(chain.inclusion);
    rec.selection = evaluate_selection(rec.selected, spec.s_star_positions, chain.inclusion);
    rec.sigma2_used = h.sigma2;
    rec.acceptance_rate = chain.acceptance_rate;
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

SettingResult run_setting(const SettingSpec& spec, const SimOptions& opts) {
  spec.validate();
  opts.validate();
  const auto start = std::chrono::steady_clock::now();

  SettingResult result;
  result.reps.resize(static_cast<std::size_t>(spec.reps));
  std::atomic<int> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (int rep = next++; rep < spec.reps; rep = next++) {
      result.reps[static_cast<std::size_t>(rep)] = run_replication(spec, opts, rep);
      if (opts.progress) {
        std::lock_guard<std::mutex> lock(log_mutex);
        const RepRecord& r = result.reps[static_cast<std::size_t>(rep)];
        std::cerr << spec.name << " rep " << rep + 1 << '/' << spec.reps << ": "
                  << (r.ok ? to_string(r.selected) : "failed: " + r.error) << '\n';
      }
    }
  };
  const int threads = std::min(opts.workers, spec.reps);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Reduction in replication order keeps the sums independent of scheduling.
  Metrics& m = result.metrics;
  for (const RepRecord& r : result.reps) {
    if (!r.ok) {
      ++m.reps_failed;
      continue;
    }
    ++m.reps_ok;
    m.p_bar_0 += r.selection.p_bar_0;
    m.p_bar_1 += r.selection.p_bar_1;
    m.pr_exact += r.selection.exact ? 1.0 : 0.0;
    m.pr_contain += r.selection.contain ? 1.0 : 0.0;
    m.fdr += r.selection.fdr;
    m.mean_sigma2 += r.sigma2_used;
    m.mean_acceptance += r.acceptance_rate;
  }
  if (m.reps_ok > 0) {
    const double k = static_cast<double>(m.reps_ok);
    m.p_bar_0 /= k;
    m.p_bar_1 /= k;
    m.pr_exact /= k;
    m.pr_contain /= k;
    m.fdr /= k;
    m.mean_sigma2 /= k;
    m.mean_acceptance /= k;
  }
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace ebreg
