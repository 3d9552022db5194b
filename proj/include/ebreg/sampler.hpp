#pragma once

#include "ebreg/lasso.hpp"
#include "ebreg/linalg.hpp"
#include "ebreg/posterior.hpp"
#include "ebreg/priors.hpp"
#include "ebreg/types.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace ebreg {

struct ChainConfig {
  int iterations = 5000;
  int burn_in = 1000;
  std::uint64_t seed = 1;
  Model init;
  Index max_size = -1;         // < 0 means the prior's rank bound
  bool record_models = false;  // keep the retained model sequence in ChainOutput::trace_models

  void validate() const;
};

/// Burn-in of 20% of the iterations.
int default_burn_in(int iterations);

/// max(5000, 10 p): at least ten proposals per coordinate, so that variables
/// picked up by the initial model get a chance to leave before burn-in ends.
int default_iterations(Index p);

struct ChainOutput {
  std::map<Model, long> visit_counts;  // retained iterations only
  Eigen::VectorXd inclusion;           // p_j: fraction of retained iterations with j active
  double acceptance_rate = 0.0;
  std::vector<int> trace_sizes;        // |S| after every iteration, burn-in included
  std::vector<Model> trace_models;     // retained states, when requested
  long retained = 0;
};

/// Current chain position: the fit of the current model and its log marginal.
struct ChainState {
  ModelFitd fit;
  double log_marg = kNegInf;
};

/// Coordinate to toggle, uniform on {0..p-1}.
int propose_flip_index(Index p, RandomSource& rng);

/// Model differing from S in exactly one uniformly chosen coordinate.
Model propose_flip(const Model& S, Index p, RandomSource& rng);

/// One Metropolis-Hastings step with the one-flip proposal. Proposals beyond
/// `max_size`, with zero prior mass, or with a singular design are rejected.
/// Returns true when the move is accepted; `state` is updated in place.
bool mh_step(ChainState& state, const DesignMatrixd& X, const Eigen::VectorXd& y, const ModelPrior& prior,
             const Hyperparams& h, RandomSource& rng, Index max_size = -1);

/// Runs the chain from cfg.init. Throws InitSingular if the initial model cannot be fit.
ChainOutput run_chain(const DesignMatrixd& X, const Eigen::VectorXd& y, const ModelPrior& prior, const Hyperparams& h,
                      const ChainConfig& cfg);

/// {j : p_j > 0.5}.
Model median_probability_model(const Eigen::VectorXd& inclusion);

/// Lasso support truncated to the max_size largest |beta_j|; empty if that model is singular.
Model lasso_initial_model(const LassoFit& lasso, const DesignMatrixd& X, const Eigen::VectorXd& y, Index max_size);

/// Retained models sorted by visit count (descending, ties by model order), at most `limit`.
std::vector<std::pair<Model, long>> top_models(const ChainOutput& chain, std::size_t limit);

}  // namespace ebreg
