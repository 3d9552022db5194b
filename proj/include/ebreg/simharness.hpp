#pragma once

#include "ebreg/lasso.hpp"
#include "ebreg/linalg.hpp"
#include "ebreg/posterior.hpp"
#include "ebreg/priors.hpp"
#include "ebreg/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ebreg {

/// One synthetic regression experiment: equicorrelated Gaussian design,
/// sparse truth, Gaussian noise.
struct SettingSpec {
  std::string name = "custom";
  Index n = 100;
  Index p = 500;
  double rho = 0.25;
  std::vector<double> beta_star_values{0.6, 1.2, 1.8, 2.4, 3.0};
  Model s_star_positions{0, 1, 2, 3, 4};
  double sigma2 = 1.0;
  int reps = 200;
  std::uint64_t seed = 1;

  void validate() const;
  Eigen::VectorXd beta_star() const;
};

/// Presets 1-3. All use rho = 0.25, sigma2 = 1, s* = 5 on the first five columns.
SettingSpec preset_setting(int preset);

/// Rows iid N(0, (1 - rho) I + rho 11^T) via x = sqrt(rho) z 1 + sqrt(1 - rho) w.
DesignMatrixd generate_design(Index n, Index p, double rho, RandomSource& rng);

/// y = X beta* + eps, eps iid N(0, sigma2).
Eigen::VectorXd generate_response(const DesignMatrixd& X, const SettingSpec& spec, RandomSource& rng);

struct SelectionRecord {
  double p_bar_0 = 0.0;
  double p_bar_1 = 0.0;
  bool exact = false;
  bool contain = false;
  double fdr = 0.0;
};

/// Per-replication selection summary. FDR = |S_hat \ S*| / max(|S_hat|, 1).
SelectionRecord evaluate_selection(const Model& S_hat, const Model& S_star, const Eigen::VectorXd& inclusion);

struct SimOptions {
  int iterations = 5000;
  int burn_in = 1000;
  double alpha = 0.999;
  double gamma = 0.001;
  std::optional<double> sigma2;  // empty: lasso estimate per replication; set: plug-in value
  PriorSpec prior;
  CvOptions cv;
  int workers = 1;
  bool progress = false;         // per-replication progress lines on stderr

  void validate() const;
};

struct RepRecord {
  bool ok = false;
  std::string error;
  SelectionRecord selection;
  Model selected;
  double sigma2_used = 0.0;
  double acceptance_rate = 0.0;
};

struct Metrics {
  double p_bar_0 = 0.0;
  double p_bar_1 = 0.0;
  double pr_exact = 0.0;
  double pr_contain = 0.0;
  double fdr = 0.0;
  double wall_time_s = 0.0;
  int reps_ok = 0;
  int reps_failed = 0;
  double mean_sigma2 = 0.0;
  double mean_acceptance = 0.0;
};

struct SettingResult {
  Metrics metrics;
  std::vector<RepRecord> reps;
};

/// Runs one replication end to end; rep seeds come from derive_seed(spec.seed, rep).
RepRecord run_replication(const SettingSpec& spec, const SimOptions& opts, int rep);

/// All replications, spread over opts.workers threads. Metrics average the
/// successful replications; failures are counted, never fatal.
SettingResult run_setting(const SettingSpec& spec, const SimOptions& opts);

}  // namespace ebreg
