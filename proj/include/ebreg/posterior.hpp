#pragma once

#include "ebreg/linalg.hpp"
#include "ebreg/priors.hpp"
#include "ebreg/types.hpp"

#include <cmath>

namespace ebreg {

/// Per-variable factor in the model posterior.
///   Integrated: (1 + alpha / (gamma sigma2))^{-1/2}, the exact integral of the
///               fractional likelihood against the conditional normal prior.
///   Nu:         nu^{-1} = (gamma + alpha / sigma2)^{-1/2}, which omits the
///               gamma^{1/2} normalizing factor of that prior.
enum class SizePenalty { Integrated, Nu };

/// Likelihood fraction alpha, conditional prior precision gamma, error variance sigma2.
struct Hyperparams {
  double alpha = 0.999;
  double gamma = 0.001;
  double sigma2 = 1.0;
  SizePenalty penalty = SizePenalty::Integrated;

  /// nu = sqrt(gamma + alpha / sigma2)
  double nu() const { return std::sqrt(gamma + alpha / sigma2); }
  double log_nu() const { return 0.5 * std::log(gamma + alpha / sigma2); }

  /// Log of the per-variable penalty selected by `penalty`.
  double log_size_penalty() const {
    return penalty == SizePenalty::Nu ? log_nu() : 0.5 * std::log1p(alpha / (gamma * sigma2));
  }

  /// Throws ValidationError unless 0 < alpha < 1, gamma > 0, sigma2 > 0.
  void validate() const;
};

/// Unnormalized log pi^n(S) = log pi(S) - alpha/(2 sigma2) RSS_S - |S| log(penalty).
/// With SizePenalty::Nu the last term is |S| log nu.
template <typename Scalar>
double log_marginal(const ModelFit<Scalar>& fit, const ModelPrior& prior, const Hyperparams& h) {
  const double log_prior = prior.log_model_prior(fit.model);
  if (log_prior == kNegInf) return kNegInf;
  const double s = static_cast<double>(fit.size());
  return log_prior - h.alpha / (2.0 * h.sigma2) * static_cast<double>(fit.rss) - s * h.log_size_penalty();
}

/// log of the fractional likelihood exp(-alpha/(2 sigma2) ||y - X_S b||^2)
/// integrated against N(b | beta_hat_S, gamma^{-1} (X_S^T X_S)^{-1}).
template <typename Scalar>
double log_integrated_weight(const ModelFit<Scalar>& fit, const Hyperparams& h) {
  const double s = static_cast<double>(fit.size());
  return -h.alpha / (2.0 * h.sigma2) * static_cast<double>(fit.rss) -
         0.5 * s * std::log1p(h.alpha / (h.gamma * h.sigma2));
}

/// One draw from N(beta_hat_S, (gamma + alpha/sigma2)^{-1} (X_S^T X_S)^{-1}),
/// returned in `fit.columns` order.
template <typename Scalar>
Vector<Scalar> sample_beta_given_model(const ModelFit<Scalar>& fit, const Hyperparams& h, RandomSource& rng) {
  const Index s = fit.size();
  Vector<Scalar> xi(s);
  for (Index k = 0; k < s; ++k) xi(k) = static_cast<Scalar>(standard_normal(rng));
  if (s == 0) return xi;
  // Cov = L^{-T} L^{-1} / nu^2, so L^{-T} xi / nu has the right law.
  fit.chol.template triangularView<Eigen::Lower>().transpose().solveInPlace(xi);
  return fit.beta_hat + xi / static_cast<Scalar>(h.nu());
}

}  // namespace ebreg
