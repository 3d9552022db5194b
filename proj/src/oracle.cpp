#include "ebreg/oracle.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ebreg {

double count_models(Index p, Index smax) {
  double total = 0.0;
  for (Index s = 0; s <= std::min(p, smax); ++s)
    total += std::exp(log_binomial(static_cast<double>(p), static_cast<double>(s)));
  return total;
}

namespace {

void guard(double count, const char* what) {
  // Slack for the rounding in exp(log C(p, s)).
  if (count > kEnumerationGuard * (1.0 + 1e-9))
    throw TooLarge(std::string(what) + " would visit " + std::to_string(static_cast<long long>(count)) +
                   " subsets (limit 1000000)");
}

void extend_all(const DesignMatrixd& X, const Eigen::VectorXd& y, const ModelFitd& fit, int next, Index smax,
                const std::function<void(const ModelFitd&)>& visit, long& singular) {
  visit(fit);
  if (fit.size() >= smax) return;
  for (int j = next; j < X.p(); ++j) {
    ModelFitd child;
    try {
      child = extend_fit(fit, X, y, j);
    } catch (const SingularModel&) {
      ++singular;
      continue;
    }
    extend_all(X, y, child, j + 1, smax, visit, singular);
  }
}

}  // namespace

long for_each_model(const DesignMatrixd& X, const Eigen::VectorXd& y, Index smax,
                    const std::function<void(const ModelFitd&)>& visit) {
  long singular = 0;
  extend_all(X, y, fit_model(X, y, Model{}), 0, std::min(smax, X.p()), visit, singular);
  return singular;
}

ExactPosterior enumerate_posterior(const DesignMatrixd& X, const Eigen::VectorXd& y, const ModelPrior& prior,
                                   const Hyperparams& h, Index smax) {
  h.validate();
  if (smax < 0) throw ValidationError("smax must be non-negative");
  smax = std::min(smax, prior.rank_bound());
  guard(count_models(X.p(), smax), "enumeration");

  ExactPosterior out;
  std::vector<double> logs;
  out.singular_models = for_each_model(X, y, smax, [&](const ModelFitd& fit) {
    const double lm = log_marginal(fit, prior, h);
    if (lm == kNegInf) return;
    out.log_marginals.emplace(fit.model, lm);
    logs.push_back(lm);
  });

  // Sum in map order so the normalizer is independent of visit order.
  logs.clear();
  for (const auto& [model, lm] : out.log_marginals) logs.push_back(lm);
  out.log_normalizer = log_sum_exp(logs);
  out.inclusion = Eigen::VectorXd::Zero(X.p());
  for (const auto& [model, lm] : out.log_marginals) {
    const double prob = std::exp(lm - out.log_normalizer);
    out.table.emplace(model, prob);
    for (int j : model) out.inclusion(j) += prob;
  }
  out.inclusion = out.inclusion.cwiseMin(1.0);  // rounding in the sum can overshoot
  return out;
}

double kappa(const DesignMatrixd& X, Index s) {
  const Index p = X.p();
  const Index n = X.n();
  if (s < 1 || s > p) throw ValidationError("kappa needs 1 <= s <= p");
  guard(std::exp(log_binomial(static_cast<double>(p), static_cast<double>(s))), "kappa");
  // More columns than rows: some s-sparse vector lies in the null space.
  if (s > n) return 0.0;

  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<int> idx(static_cast<std::size_t>(s));
  for (Index k = 0; k < s; ++k) idx[static_cast<std::size_t>(k)] = static_cast<int>(k);

  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd sub(n, s);
  while (true) {
    for (Index k = 0; k < s; ++k) sub.col(k) = X.col(idx[static_cast<std::size_t>(k)]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    const auto& sv = svd.singularValues();
    double smallest = sv(sv.size() - 1);
    // Below the numerical-rank threshold the submatrix is exactly rank deficient.
    if (smallest <= eps * static_cast<double>(std::max(n, s)) * sv(0)) smallest = 0.0;
    best = std::min(best, smallest);
    if (best == 0.0) break;

    // Next combination in lexicographic order.
    Index k = s - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == p - s + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (Index m = k + 1; m < s; ++m) idx[static_cast<std::size_t>(m)] = idx[static_cast<std::size_t>(m - 1)] + 1;
  }
  return best;
}

double denominator_constant(const Hyperparams& hp) { return 0.5 * std::log1p(hp.alpha / (hp.gamma * hp.sigma2)); }

RateConstants rate_constants(const Hyperparams& hp) { return rate_constants(hp, 0.5 * (1.0 + 1.0 / hp.alpha)); }

RateConstants rate_constants(const Hyperparams& hp, double holder) {
  hp.validate();
  if (!(holder > 1.0 && holder * hp.alpha < 1.0)) throw ValidationError("Holder exponent must lie in (1, 1/alpha)");
  RateConstants rc;
  rc.holder = holder;
  rc.q = (holder - 1.0) / holder;
  rc.d = hp.alpha * (1.0 - holder * hp.alpha) / (2.0 * hp.sigma2);
  // (1 + q g s2)^{1 - 1/q} in log space; the exponent is large and negative for h near 1.
  const double log_inner = (1.0 - 1.0 / rc.q) * std::log1p(rc.q * hp.gamma * hp.sigma2) - std::log(hp.sigma2);
  rc.phi = std::exp(0.5 * log_inner);
  rc.c = denominator_constant(hp);
  rc.nu = hp.nu();
  return rc;
}

DenominatorBound denominator_bound_check(const DesignMatrixd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta_star,
                          const ModelPrior& prior, const Hyperparams& h) {
  h.validate();
  if (beta_star.size() != X.p()) throw ValidationError("beta_star length does not match design");
  const Index R = prior.rank_bound();
  guard(count_models(X.p(), R), "denominator bound check");

  Model star;
  for (Index j = 0; j < beta_star.size(); ++j)
    if (beta_star(j) != 0.0) star.push_back(static_cast<int>(j));

  const double shift = h.alpha / (2.0 * h.sigma2) * (y - X.values() * beta_star).squaredNorm();
  std::vector<double> terms;
  for_each_model(X, y, R, [&](const ModelFitd& fit) {
    const double lp = prior.log_model_prior(fit.model);
    if (lp == kNegInf) return;
    terms.push_back(lp + log_integrated_weight(fit, h) + shift);
  });

  DenominatorBound out;
  out.c = denominator_constant(h);
  out.log_lhs = log_sum_exp(terms);
  out.log_rhs = prior.log_model_prior(star) - out.c * static_cast<double>(star.size());
  out.holds = out.log_lhs >= out.log_rhs;
  return out;
}

double nested_chisq_stat(const DesignMatrixd& X, const Eigen::VectorXd& y, const Model& S_star, const Model& S,
                         double sigma2) {
  if (!(sigma2 > 0)) throw ValidationError("sigma2 must be positive");
  if (!is_subset(canonical(S_star), canonical(S))) throw ValidationError("S must contain S_star");
  const double inner = fit_model(X, y, S_star).rss;
  const double outer = fit_model(X, y, S).rss;
  return std::max(0.0, inner - outer) / sigma2;
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0)) throw ValidationError("gamma shape must be positive");
  if (x <= 0) return 0.0;
  const double log_prefactor = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 1000; ++k) {
      term *= x / (a + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return std::exp(log_prefactor) * sum;
  }
  // Continued fraction for Q(a, x), modified Lentz.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int k = 1; k < 1000; ++k) {
    const double an = -k * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double step = d * c;
    f *= step;
    if (std::abs(step - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_prefactor) * f;
}

double chi_square_cdf(double x, double df) { return regularized_gamma_p(0.5 * df, 0.5 * x); }

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ValidationError("KS statistic needs a non-empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    worst = std::max({worst, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
  }
  return worst;
}

double ks_critical_value(std::size_t n, double level) {
  if (n == 0 || !(level > 0 && level < 1)) throw ValidationError("KS critical value needs n > 0 and level in (0,1)");
  return std::sqrt(-0.5 * std::log(level / 2.0)) / std::sqrt(static_cast<double>(n));
}

double beta_min_cutoff(const Hyperparams& h, double kappa_s, Index p, double M) {
  if (kappa_s == 0.0) throw DivideByZero("beta-min cutoff is undefined for kappa = 0");
  if (!(kappa_s > 0) || !(M > 0) || !(h.alpha > 0) || !(h.sigma2 > 0) || p < 1)
    throw ValidationError("beta-min cutoff needs kappa > 0, M > 0, alpha > 0, sigma2 > 0, p >= 1");
  return std::sqrt(h.sigma2) / kappa_s *
         std::sqrt(2.0 * M * (1.0 + h.alpha) / h.alpha * std::log(static_cast<double>(p)));
}

double log_zeta(const ModelPrior& prior, Index s_star, const RateConstants& rc) {
  if (s_star < 0 || s_star > prior.rank_bound()) throw ValidationError("s_star must lie in [0, R]");
  std::vector<double> terms;
  const double log_phi = std::log(rc.phi);
  for (Index s = 0; s <= prior.rank_bound(); ++s) {
    const double lf = prior.log_size_mass(s);
    if (lf != kNegInf) terms.push_back(static_cast<double>(s) * log_phi + lf);
  }
  return log_binomial(static_cast<double>(prior.p()), static_cast<double>(s_star)) - prior.log_size_mass(s_star) +
         log_sum_exp(terms);
}

std::vector<Eigen::VectorXd> posterior_beta_draws(const DesignMatrixd& X, const Eigen::VectorXd& y,
                                                  const ChainOutput& chain, const Hyperparams& h, RandomSource& rng) {
  if (chain.trace_models.empty()) throw ValidationError("chain was run without record_models");
  std::map<Model, ModelFitd> cache;
  std::vector<Eigen::VectorXd> draws;
  draws.reserve(chain.trace_models.size());
  for (const Model& model : chain.trace_models) {
    auto it = cache.find(model);
    if (it == cache.end()) it = cache.emplace(model, fit_model(X, y, model)).first;
    const ModelFitd& fit = it->second;
    draws.push_back(fit.scatter(sample_beta_given_model(fit, h, rng), X.p()));
  }
  return draws;
}

ConcentrationMasses concentration_diagnostic(const std::vector<Eigen::VectorXd>& beta_draws, const DesignMatrixd& X,
                                             const Eigen::VectorXd& beta_star, const Thresholds& thresholds) {
  if (beta_draws.empty()) throw ValidationError("no posterior draws");
  ConcentrationMasses out;
  for (const Eigen::VectorXd& b : beta_draws) {
    const Eigen::VectorXd diff = b - beta_star;
    if ((X.values() * diff).squaredNorm() > thresholds.eps) out.mass_pred += 1.0;
    if (diff.squaredNorm() > thresholds.delta) out.mass_l2 += 1.0;
    if (static_cast<double>((b.array() != 0.0).count()) >= thresholds.Delta) out.mass_dim += 1.0;
  }
  const double m = static_cast<double>(beta_draws.size());
  out.mass_pred /= m;
  out.mass_l2 /= m;
  out.mass_dim /= m;
  return out;
}

}  // namespace ebreg
