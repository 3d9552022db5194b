#include "ebreg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ebreg {

void ChainConfig::validate() const {
  if (iterations < 1) throw ValidationError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw ValidationError("burn-in must lie in [0, iterations)");
  if (canonical(init) != init) throw ValidationError("initial model must be sorted without repeats");
  if (max_size >= 0 && static_cast<Index>(init.size()) > max_size)
    throw ValidationError("initial model exceeds the maximum model size");
}

int default_burn_in(int iterations) { return iterations / 5; }

int default_iterations(Index p) { return static_cast<int>(std::max<Index>(5000, 10 * p)); }

int propose_flip_index(Index p, RandomSource& rng) {
  if (p < 1) throw ValidationError("proposal needs p >= 1");
  std::uniform_int_distribution<int> pick(0, static_cast<int>(p) - 1);
  return pick(rng);
}

Model propose_flip(const Model& S, Index p, RandomSource& rng) {
  const int j = propose_flip_index(p, rng);
  return contains(S, j) ? without_index(S, j) : with_index(S, j);
}

bool mh_step(ChainState& state, const DesignMatrixd& X, const Eigen::VectorXd& y, const ModelPrior& prior,
             const Hyperparams& h, RandomSource& rng, Index max_size) {
  const Index limit = max_size < 0 ? prior.rank_bound() : std::min(max_size, prior.rank_bound());
  const int j = propose_flip_index(X.p(), rng);

  ModelFitd proposal;
  if (contains(state.fit.model, j)) {
    proposal = drop_fit(state.fit, X, y, j);
  } else {
    if (state.fit.size() + 1 > limit) return false;
    if (prior.log_size_mass(state.fit.size() + 1) == kNegInf) return false;
    try {
      proposal = extend_fit(state.fit, X, y, j);
    } catch (const SingularModel&) {
      return false;
    }
  }

  const double next = log_marginal(proposal, prior, h);
  if (next == kNegInf) return false;
  const double delta = next - state.log_marg;
  if (delta < 0.0 && !(std::log(uniform01(rng)) < delta)) return false;

  state.fit = std::move(proposal);
  state.log_marg = next;
  return true;
}

ChainOutput run_chain(const DesignMatrixd& X, const Eigen::VectorXd& y, const ModelPrior& prior, const Hyperparams& h,
                      const ChainConfig& cfg) {
  cfg.validate();
  h.validate();
  if (y.size() != X.n()) throw ValidationError("response length does not match design rows");
  if (prior.p() != X.p()) throw ValidationError("prior dimension does not match design");
  for (int j : cfg.init)
    if (j < 0 || j >= X.p()) throw ValidationError("initial model index out of range");

  ChainState state;
  try {
    state.fit = fit_model(X, y, cfg.init);
  } catch (const SingularModel& e) {
    throw InitSingular(std::string("initial model is singular: ") + e.what());
  }
  state.log_marg = log_marginal(state.fit, prior, h);
  if (state.log_marg == kNegInf) throw InitSingular("initial model has zero prior mass");

  RandomSource rng(cfg.seed);
  ChainOutput out;
  out.inclusion = Eigen::VectorXd::Zero(X.p());
  out.trace_sizes.reserve(static_cast<std::size_t>(cfg.iterations));
  if (cfg.record_models) out.trace_models.reserve(static_cast<std::size_t>(cfg.iterations - cfg.burn_in));

  long accepted = 0;
  for (int t = 0; t < cfg.iterations; ++t) {
    if (mh_step(state, X, y, prior, h, rng, cfg.max_size)) ++accepted;
    out.trace_sizes.push_back(static_cast<int>(state.fit.size()));
    if (t < cfg.burn_in) continue;
    ++out.visit_counts[state.fit.model];
    for (int j : state.fit.model) out.inclusion(j) += 1.0;
    if (cfg.record_models) out.trace_models.push_back(state.fit.model);
  }
  out.retained = cfg.iterations - cfg.burn_in;
  out.inclusion /= static_cast<double>(out.retained);
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.iterations);
  return out;
}

Model median_probability_model(const Eigen::VectorXd& inclusion) {
  Model out;
  for (Index j = 0; j < inclusion.size(); ++j) {
    if (!(inclusion(j) >= 0.0 && inclusion(j) <= 1.0)) throw ValidationError("inclusion probabilities must lie in [0,1]");
    if (inclusion(j) > 0.5) out.push_back(static_cast<int>(j));
  }
  return out;
}

Model lasso_initial_model(const LassoFit& lasso, const DesignMatrixd& X, const Eigen::VectorXd& y, Index max_size) {
  Model support = lasso.support();
  if (max_size >= 0 && static_cast<Index>(support.size()) > max_size) {
    std::stable_sort(support.begin(), support.end(),
                     [&](int a, int b) { return std::abs(lasso.beta(a)) > std::abs(lasso.beta(b)); });
    support.resize(static_cast<std::size_t>(max_size));
    support = canonical(std::move(support));
  }
  try {
    (void)fit_model(X, y, support);
  } catch (const SingularModel&) {
    return {};
  }
  return support;
}

std::vector<std::pair<Model, long>> top_models(const ChainOutput& chain, std::size_t limit) {
  std::vector<std::pair<Model, long>> all(chain.visit_counts.begin(), chain.visit_counts.end());
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (all.size() > limit) all.resize(limit);
  return all;
}

}  // namespace ebreg
