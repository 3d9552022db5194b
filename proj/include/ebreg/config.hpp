#pragma once

#include "ebreg/posterior.hpp"
#include "ebreg/priors.hpp"
#include "ebreg/simharness.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace ebreg {

/// Everything a CLI run depends on. Serialized into every report so a run
/// can be repeated from its own output. Worker count and output paths are
/// left out so they cannot change report bytes.
struct RunConfig {
  std::string command = "fit";  // fit | simulate | enumerate | diagnose

  double alpha = 0.999;
  double gamma = 0.001;
  std::optional<double> sigma2;  // empty: estimate from the lasso fit
  PriorSpec prior;

  std::optional<int> iterations;  // empty: default_iterations(p)
  std::optional<int> burn_in;     // empty: 20% of iterations
  std::uint64_t seed = 1;
  int folds = 5;

  std::string input;   // CSV for fit and enumerate

  // Destinations. Accepted on input but not serialized, like workers.
  std::string output;  // report path; empty writes to stdout
  std::string csv;     // simulate: metrics table path
  std::string trace;   // fit and diagnose: |S| trace CSV path

  int preset = 1;
  std::optional<int> reps;              // empty: the setting's own count
  std::optional<SettingSpec> setting;   // custom simulation setting, overrides preset

  int smax = -1;       // enumerate: largest model size, < 0 means rank(X)
  int top = 20;        // fit: number of visited models reported
  int instances = 100; // diagnose: random D_n bound instances

  int workers = 1;

  void validate() const;
  Hyperparams hyperparams(double sigma2_value) const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Inverse of to_json. Unknown keys and ill-typed values raise ValidationError.
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config(const std::string& path);

/// Simulation setting of a run: the custom one if given, else the preset,
/// with reps and seed taken from the config.
SettingSpec resolve_setting(const RunConfig& cfg);

}  // namespace ebreg
