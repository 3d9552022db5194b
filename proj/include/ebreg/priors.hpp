#pragma once

#include "ebreg/linalg.hpp"
#include "ebreg/types.hpp"

#include <memory>
#include <string>
#include <variant>

namespace ebreg {

/// f(s) proportional to c^{-s} p^{-a s} on {0..R}.
struct Complexity {
  double a = 0.05;
  double c = 1.0;
};

/// Beta(a_n, 1) mixture of Bin(R, 1 - w) with a_n = a * R.
struct BetaBinomial {
  double a = 1.0;
};

/// Bin(R, 1/R).
struct BinomialRinv {};

class ModelPrior;

/// (1 - w) * base + w * point mass at `anchor`, with w = exp(-r R).
struct Mixture {
  std::shared_ptr<const ModelPrior> base;
  double r = 1.0;
  Model anchor;
};

using PriorFamily = std::variant<Complexity, BetaBinomial, BinomialRinv, Mixture>;

/// Prior over models: uniform within each size, size mass f on {0..R}.
class ModelPrior {
public:
  ModelPrior(PriorFamily family, Index p, Index R);

  const PriorFamily& family() const { return family_; }
  Index p() const { return p_; }
  Index rank_bound() const { return R_; }
  std::string name() const;

  /// log f(s); -inf outside {0..R}.
  double log_size_mass(Index s) const;

  /// log pi(S).
  double log_model_prior(const Model& S) const;

  /// Mixture weight w = exp(-r R); zero for the other families.
  double mixture_weight() const;

private:
  PriorFamily family_;
  Index p_;
  Index R_;
  std::vector<double> log_mass_;  // log f(s), s = 0..R
};

/// First R linearly independent columns, scanning left to right. Used as the
/// mixture anchor; its span equals span(X) when R is the rank of X.
Model spanning_anchor(const DesignMatrixd& X, Index R);

/// Default size prior: Complexity(a = 0.05, c = 1).
ModelPrior default_prior(Index p, Index R);

/// Family name plus parameters; turned into a ModelPrior once p and R are known.
struct PriorSpec {
  std::string family = "complexity";  // complexity | betabinom | binom | mixture
  double a = 0.05;
  double c = 1.0;
  double r = 1.0;                      // mixture rate, w = exp(-r R)
  std::string base = "complexity";     // mixture base family

  void validate() const;
};

/// The mixture anchor is spanning_anchor(X, R).
ModelPrior make_prior(const PriorSpec& spec, const DesignMatrixd& X, Index R);

/// Without a design; a mixture is anchored at the first R columns.
ModelPrior make_prior(const PriorSpec& spec, Index p, Index R);

}  // namespace ebreg
