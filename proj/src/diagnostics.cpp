#include "ebreg/diagnostics.hpp"

#include "ebreg/priors.hpp"
#include "ebreg/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ebreg {

DenominatorBoundSummary denominator_bound_suite(std::uint64_t seed, int instances, Index n, Index p, Index max_s_star) {
  if (instances < 1) throw ValidationError("instances must be positive");
  if (max_s_star < 0 || max_s_star > p) throw ValidationError("max_s_star must lie in [0, p]");
  DenominatorBoundSummary out;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < instances; ++k) {
    RandomSource rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    const DesignMatrixd X = generate_design(n, p, 0.25, rng);

    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const Index s_star = std::uniform_int_distribution<Index>(0, max_s_star)(rng);
    Eigen::VectorXd beta_star = Eigen::VectorXd::Zero(p);
    for (Index k2 = 0; k2 < s_star; ++k2) {
      const double mag = 0.5 + 1.5 * uniform01(rng);
      beta_star(order[static_cast<std::size_t>(k2)]) = uniform01(rng) < 0.5 ? -mag : mag;
    }
    Eigen::VectorXd y = X.values() * beta_star;
    for (Index i = 0; i < n; ++i) y(i) += standard_normal(rng);

    Hyperparams h;
    h.alpha = 0.5 + 0.5 * uniform01(rng);
    h.gamma = std::exp(std::log(1e-3) * (1.0 - uniform01(rng)));
    h.sigma2 = 1.0;
    // alpha may land exactly on 0.5 with probability 2^-53; nudge it inside.
    if (h.alpha <= 0.5) h.alpha = std::nextafter(0.5, 1.0);

    const ModelPrior prior = default_prior(p, rank_of(X));
    const DenominatorBound r = denominator_bound_check(X, y, beta_star, prior, h);
    ++out.instances;
    if (r.holds) ++out.passed;
    out.min_margin = std::min(out.min_margin, r.log_lhs - r.log_rhs);
  }
  return out;
}

KappaSweep kappa_sweep(const DesignMatrixd& X) {
  KappaSweep out;
  const Index top = std::min(X.n(), X.p());
  for (Index s = 1; s <= top; ++s) {
    const double k = kappa(X, s);
    if (!out.values.empty() && k > out.values.back()) out.non_increasing = false;
    out.values.push_back(k);
  }
  return out;
}

NestedChisqSummary nested_chisq_suite(std::uint64_t seed, int draws, double level) {
  if (draws < 1) throw ValidationError("draws must be positive");
  const Index n = 50, p = 8;
  RandomSource design_rng(derive_seed(seed, 0));
  const DesignMatrixd X = generate_design(n, p, 0.25, design_rng);
  Eigen::VectorXd beta_star = Eigen::VectorXd::Zero(p);
  beta_star.head(3) << 1.0, -1.0, 0.5;
  const Eigen::VectorXd mean = X.values() * beta_star;
  const Model star{0, 1, 2};
  const Model bigger{0, 1, 2, 3, 4};

  NestedChisqSummary out;
  out.draws = draws;
  RandomSource rng(derive_seed(seed, 1));
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXd y = mean;
    for (Index i = 0; i < n; ++i) y(i) += standard_normal(rng);
    out.stats.push_back(nested_chisq_stat(X, y, star, bigger, 1.0));
  }
  out.ks = ks_statistic(out.stats, [](double x) { return chi_square_cdf(x, 2.0); });
  out.critical = ks_critical_value(out.stats.size(), level);
  out.pass = out.ks < out.critical;
  return out;
}

}  // namespace ebreg
