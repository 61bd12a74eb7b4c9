#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dgb {

/// Configuration problems: malformed file, unknown names, bad values.
/// The CLI maps these to exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical problems: assumption violations, solver failures, non-convergence.
/// The CLI maps these to exit status 3 (after writing the report when one exists).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> slack;
  bool force_validate_only = false;  // the `validate` subcommand
};

struct RunOutcome {
  int exit_code = 0;  // 0 pass, 1 bounds failed, 3 numerical failure
  bool overall_pass = false;
  std::string report_path;
};

/// Executes the scenario named in the config file, writes report.json,
/// bounds.csv, and optional profile CSVs into the output directory, and
/// returns the outcome. Exit status 0 iff overall pass.
RunOutcome run(const std::string& config_path, const CliOverrides& overrides = {});

/// Runs once per value of the swept parameter (t, d, alpha, beta, mu, epsilon,
/// or N), aggregating one set of comparison rows per value in bounds.csv;
/// deterministic value ordering.
RunOutcome sweep(const std::string& config_path, const std::string& axis,
                 const std::vector<double>& values, const CliOverrides& overrides = {});

/// Names and one-line descriptions of the built-in scenarios.
std::vector<std::pair<std::string, std::string>> builtin_scenarios();

/// In-memory variant used by tests: parses a config JSON string and runs it.
RunOutcome run_json_string(const std::string& config_json, const std::string& out_dir,
                           const CliOverrides& overrides = {});

}  // namespace dgb
