#pragma once

#include "ebreg/linalg.hpp"
#include "ebreg/posterior.hpp"
#include "ebreg/priors.hpp"
#include "ebreg/sampler.hpp"
#include "ebreg/types.hpp"

#include <functional>
#include <map>
#include <vector>

namespace ebreg {

inline constexpr double kEnumerationGuard = 1e6;

/// Exactly normalized model posterior over {S : |S| <= smax}.
struct ExactPosterior {
  std::map<Model, double> table;         // normalized probabilities
  std::map<Model, double> log_marginals; // unnormalized log pi^n(S)
  double log_normalizer = kNegInf;
  Eigen::VectorXd inclusion;
  long singular_models = 0;              // subsets skipped as rank deficient
};

/// Number of subsets of {0..p-1} with size at most smax, as a double.
double count_models(Index p, Index smax);

/// Visits every non-singular model with |S| <= smax by depth-first extension.
/// Supersets of a singular model are skipped. Returns the number of singular
/// subsets encountered.
long for_each_model(const DesignMatrixd& X, const Eigen::VectorXd& y, Index smax,
                    const std::function<void(const ModelFitd&)>& visit);

/// Throws TooLarge when more than 1e6 models would be visited.
ExactPosterior enumerate_posterior(const DesignMatrixd& X, const Eigen::VectorXd& y, const ModelPrior& prior,
                                   const Hyperparams& h, Index smax);

/// Smallest singular value of X_T minimized over |T| = s.
double kappa(const DesignMatrixd& X, Index s);

/// Constants from the concentration argument for a Holder exponent h in (1, 1/alpha).
struct RateConstants {
  double holder = 0.0;  // h
  double q = 0.0;       // (h - 1) / h
  double d = 0.0;       // alpha (1 - h alpha) / (2 sigma^2)
  double phi = 0.0;     // {(1 + q gamma sigma^2)^{1 - 1/q} / sigma^2}^{1/2}
  double c = 0.0;       // (1/2) log(1 + alpha / (gamma sigma^2))
  double nu = 0.0;
};

/// Default h is the midpoint (1 + 1/alpha) / 2.
RateConstants rate_constants(const Hyperparams& hp);
RateConstants rate_constants(const Hyperparams& hp, double holder);

/// (1/2) log(1 + alpha / (gamma sigma^2)).
double denominator_constant(const Hyperparams& hp);

struct DenominatorBound {
  double log_lhs = 0.0;  // log D_n
  double log_rhs = 0.0;  // log pi(S*) - c |S*|
  double c = 0.0;
  bool holds = false;
};

/// Exact D_n over all models |S| <= R against the lower bound pi(S*) e^{-c|S*|}.
DenominatorBound denominator_bound_check(const DesignMatrixd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta_star,
                          const ModelPrior& prior, const Hyperparams& h);

/// (RSS_{S*} - RSS_S) / sigma2 for S containing S*.
double nested_chisq_stat(const DesignMatrixd& X, const Eigen::VectorXd& y, const Model& S_star, const Model& S,
                         double sigma2);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
double chi_square_cdf(double x, double df);

/// sup |F_n - F| for the sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic one-sample KS critical value sqrt(-log(level/2)/2) / sqrt(n).
double ks_critical_value(std::size_t n, double level);

/// rho_n = (sigma / kappa) {2 M (1 + alpha) / alpha * log p}^{1/2}.
double beta_min_cutoff(const Hyperparams& h, double kappa_s, Index p, double M);

/// log zeta_n = log C(p, s*) - log f(s*) + log sum_{s<=R} phi^s f(s).
double log_zeta(const ModelPrior& prior, Index s_star, const RateConstants& rc);

struct Thresholds {
  double eps = 0.0;    // on ||X(beta - beta*)||^2
  double delta = 0.0;  // on ||beta - beta*||^2
  double Delta = 0.0;  // on |S_beta|
};

struct ConcentrationMasses {
  double mass_pred = 0.0;
  double mass_l2 = 0.0;
  double mass_dim = 0.0;
};

/// Full p-vector coefficient draws, one per retained model in chain.trace_models.
std::vector<Eigen::VectorXd> posterior_beta_draws(const DesignMatrixd& X, const Eigen::VectorXd& y,
                                                  const ChainOutput& chain, const Hyperparams& h, RandomSource& rng);

/// Empirical posterior mass of {||X(b - b*)||^2 > eps}, {||b - b*||^2 > delta}, {|S_b| >= Delta}.
ConcentrationMasses concentration_diagnostic(const std::vector<Eigen::VectorXd>& beta_draws, const DesignMatrixd& X,
                                             const Eigen::VectorXd& beta_star, const Thresholds& thresholds);

}  // namespace ebreg
