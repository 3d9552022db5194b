#pragma once

#include "ebreg/linalg.hpp"
#include "ebreg/oracle.hpp"
#include "ebreg/posterior.hpp"
#include "ebreg/types.hpp"

#include <cstdint>
#include <vector>

namespace ebreg {

/// D_n lower-bound check over random small problems: rows from the equicorrelated design
/// (rho = 0.25), s* uniform on {0..max_s_star}, alpha uniform on (0.5, 1),
/// log gamma uniform on (log 1e-3, 0), sigma2 = 1, default complexity prior.
struct DenominatorBoundSummary {
  int instances = 0;
  int passed = 0;
  double min_margin = 0.0;  // min over instances of log D_n - log bound
};

DenominatorBoundSummary denominator_bound_suite(std::uint64_t seed, int instances, Index n = 30, Index p = 8, Index max_s_star = 3);

/// kappa(s) for s = 1..min(n, p).
struct KappaSweep {
  std::vector<double> values;
  bool non_increasing = true;
};

KappaSweep kappa_sweep(const DesignMatrixd& X);

/// (RSS_{S*} - RSS_S) / sigma2 over replicate noise draws on one fixed design,
/// S* = {0, 1, 2} and S = S* + {3, 4}, compared to ChiSq(2) by a KS test.
struct NestedChisqSummary {
  int draws = 0;
  double ks = 0.0;
  double critical = 0.0;
  bool pass = false;
  std::vector<double> stats;
};

NestedChisqSummary nested_chisq_suite(std::uint64_t seed, int draws, double level = 0.01);

}  // namespace ebreg
