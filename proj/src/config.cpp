#include "ebreg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ebreg {

using nlohmann::json;

namespace {

const std::set<std::string> kCommands{"fit", "simulate", "enumerate", "diagnose"};

json setting_to_json(const SettingSpec& s) {
  json support = json::array();
  for (int j : s.s_star_positions) support.push_back(j + 1);
  return json{{"name", s.name},       {"n", s.n},         {"p", s.p},
              {"rho", s.rho},         {"sigma2", s.sigma2}, {"beta_star", s.beta_star_values},
              {"support", support}};
}

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' is missing or has the wrong type");
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ValidationError("unknown " + where + " key '" + it.key() + "'");
}

SettingSpec setting_from_json(const json& j) {
  check_keys(j, {"name", "n", "p", "rho", "sigma2", "beta_star", "support"}, "setting");
  SettingSpec s;
  if (j.contains("name")) s.name = get_field<std::string>(j, "name");
  s.n = get_field<Index>(j, "n");
  s.p = get_field<Index>(j, "p");
  if (j.contains("rho")) s.rho = get_field<double>(j, "rho");
  if (j.contains("sigma2")) s.sigma2 = get_field<double>(j, "sigma2");
  s.beta_star_values = get_field<std::vector<double>>(j, "beta_star");
  s.s_star_positions.clear();
  for (int j1 : get_field<std::vector<int>>(j, "support")) {
    if (j1 < 1) throw ValidationError("setting support is 1-based");
    s.s_star_positions.push_back(j1 - 1);
  }
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (!kCommands.count(command)) throw ValidationError("unknown command '" + command + "'");
  hyperparams(sigma2.value_or(1.0)).validate();
  prior.validate();
  if (iterations && *iterations < 1) throw ValidationError("iterations must be positive");
  if (burn_in && *burn_in < 0) throw ValidationError("burn-in must be non-negative");
  if (iterations && burn_in && *burn_in >= *iterations) throw ValidationError("burn-in must be below iterations");
  if (folds < 2) throw ValidationError("folds must be at least 2");
  if (workers < 1) throw ValidationError("workers must be positive");
  if (top < 0) throw ValidationError("top must be non-negative");
  if (instances < 1) throw ValidationError("instances must be positive");
  if (reps && *reps < 1) throw ValidationError("reps must be positive");
  if ((command == "fit" || command == "enumerate") && input.empty())
    throw ValidationError(command + " needs an input CSV");
  if (command == "simulate") {
    if (!setting && (preset < 1 || preset > 3)) throw ValidationError("preset must be 1, 2 or 3");
    resolve_setting(*this).validate();
  }
}

Hyperparams RunConfig::hyperparams(double sigma2_value) const {
  Hyperparams h;
  h.alpha = alpha;
  h.gamma = gamma;
  h.sigma2 = sigma2_value;
  return h;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["alpha"] = cfg.alpha;
  j["gamma"] = cfg.gamma;
  j["sigma2"] = cfg.sigma2 ? json(*cfg.sigma2) : json("estimate");
  j["prior"] = json{{"family", cfg.prior.family}, {"a", cfg.prior.a}, {"c", cfg.prior.c},
                    {"r", cfg.prior.r},           {"base", cfg.prior.base}};
  j["iterations"] = cfg.iterations ? json(*cfg.iterations) : json(nullptr);
  j["burn_in"] = cfg.burn_in ? json(*cfg.burn_in) : json(nullptr);
  j["seed"] = cfg.seed;
  j["folds"] = cfg.folds;
  j["input"] = cfg.input;
  j["preset"] = cfg.preset;
  j["reps"] = cfg.reps ? json(*cfg.reps) : json(nullptr);
  j["setting"] = cfg.setting ? setting_to_json(*cfg.setting) : json(nullptr);
  j["smax"] = cfg.smax;
  j["top"] = cfg.top;
  j["instances"] = cfg.instances;
  return j;
}

RunConfig config_from_json(const json& j) {
  check_keys(j,
             {"command", "alpha", "gamma", "sigma2", "prior", "iterations", "burn_in", "seed", "folds", "input",
              "output", "csv", "trace", "preset", "reps", "setting", "smax", "top", "instances", "workers"},
             "config");
  RunConfig cfg;
  if (j.contains("command")) cfg.command = get_field<std::string>(j, "command");
  if (j.contains("alpha")) cfg.alpha = get_field<double>(j, "alpha");
  if (j.contains("gamma")) cfg.gamma = get_field<double>(j, "gamma");
  if (j.contains("sigma2")) {
    const json& s = j.at("sigma2");
    if (s.is_string()) {
      if (s.get<std::string>() != "estimate") throw ValidationError("sigma2 must be a number or \"estimate\"");
    } else if (s.is_number()) {
      cfg.sigma2 = s.get<double>();
    } else if (!s.is_null()) {
      throw ValidationError("sigma2 must be a number or \"estimate\"");
    }
  }
  if (j.contains("prior")) {
    const json& p = j.at("prior");
    check_keys(p, {"family", "a", "c", "r", "base"}, "prior");
    if (p.contains("family")) cfg.prior.family = get_field<std::string>(p, "family");
    if (p.contains("a")) cfg.prior.a = get_field<double>(p, "a");
    if (p.contains("c")) cfg.prior.c = get_field<double>(p, "c");
    if (p.contains("r")) cfg.prior.r = get_field<double>(p, "r");
    if (p.contains("base")) cfg.prior.base = get_field<std::string>(p, "base");
  }
  auto optional_int = [&](const char* key, std::optional<int>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = get_field<int>(j, key);
  };
  optional_int("iterations", cfg.iterations);
  optional_int("burn_in", cfg.burn_in);
  optional_int("reps", cfg.reps);
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("folds")) cfg.folds = get_field<int>(j, "folds");
  if (j.contains("input")) cfg.input = get_field<std::string>(j, "input");
  if (j.contains("output")) cfg.output = get_field<std::string>(j, "output");
  if (j.contains("csv")) cfg.csv = get_field<std::string>(j, "csv");
  if (j.contains("trace")) cfg.trace = get_field<std::string>(j, "trace");
  if (j.contains("preset")) cfg.preset = get_field<int>(j, "preset");
  if (j.contains("setting") && !j.at("setting").is_null()) cfg.setting = setting_from_json(j.at("setting"));
  if (j.contains("smax")) cfg.smax = get_field<int>(j, "smax");
  if (j.contains("top")) cfg.top = get_field<int>(j, "top");
  if (j.contains("instances")) cfg.instances = get_field<int>(j, "instances");
  if (j.contains("workers")) cfg.workers = get_field<int>(j, "workers");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError("config file " + path + " is not valid JSON");
  // A report embeds its config under "config"; accept either form.
  if (j.is_object() && j.contains("config") && j.at("config").is_object()) j = j.at("config");
  return config_from_json(j);
}

SettingSpec resolve_setting(const RunConfig& cfg) {
  SettingSpec spec = cfg.setting ? *cfg.setting : preset_setting(cfg.preset);
  if (cfg.reps) spec.reps = *cfg.reps;
  spec.seed = cfg.seed;
  return spec;
}

}  // namespace ebreg
