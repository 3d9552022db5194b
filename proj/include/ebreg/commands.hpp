#pragma once

#include "ebreg/config.hpp"
#include "ebreg/linalg.hpp"

#include <json.hpp>

#include <exception>
#include <istream>
#include <string>
#include <vector>

namespace ebreg {

/// Response in the first column, predictors after it.
struct Dataset {
  DesignMatrixd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;  // predictor column names
};

/// Comma-separated with a header row. Empty or non-numeric cells, ragged rows,
/// fewer than two rows or no predictor column raise MalformedInput.
Dataset parse_csv(std::istream& in);
Dataset read_csv(const std::string& path);

/// Each command returns its JSON report; the config is embedded under "config".
/// Variable indices in reports are 1-based.
nlohmann::json cmd_fit(const RunConfig& cfg);
nlohmann::json cmd_enumerate(const RunConfig& cfg);
nlohmann::json cmd_diagnose(const RunConfig& cfg);

/// Metrics report. The wall time only goes to the CSV table so the JSON stays
/// reproducible; `csv_table` receives header plus one row when non-null.
nlohmann::json cmd_simulate(const RunConfig& cfg, std::string* csv_table = nullptr);

/// Dispatch on cfg.command.
nlohmann::json run_command(const RunConfig& cfg, std::string* csv_table = nullptr);

/// Report text as written to disk: 2-space indent, trailing newline.
std::string render_report(const nlohmann::json& report);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

/// Process exit code for an error escaping a command: bad requests and inputs
/// give 2, everything else (numeric failures) 3.
int exit_code_for(const std::exception& e);

}  // namespace ebreg
