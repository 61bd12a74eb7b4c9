#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>

#include "dgbound/harness.hpp"

namespace {

dgb::CliOverrides make_overrides(const std::string& out, std::uint64_t seed,
                                 bool seed_set, int threads, bool threads_set,
                                 double slack, bool slack_set) {
  dgb::CliOverrides ov;
  if (!out.empty()) ov.out_dir = out;
  if (seed_set) ov.seed = seed;
  if (threads_set) ov.threads = threads;
  if (slack_set) ov.slack = slack;
  return ov;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dgbound: diffusion bound certification for degenerate parabolic equations"};
  app.require_subcommand(1);

  std::string config, out_dir, axis, values_csv;
  std::uint64_t seed = 0;
  int threads = 1;
  double slack = 0.02;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* copt = cmd->add_option("--config", config, "run configuration file (JSON)");
    if (needs_config) copt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "random seed echoed into the report");
    cmd->add_option("--threads", threads, "worker threads for column solves");
    cmd->add_option("--slack", slack, "relative slack for bound comparisons");
  };

  auto* cmd_run = app.add_subcommand("run", "execute one scenario");
  add_common(cmd_run, true);

  auto* cmd_sweep = app.add_subcommand("sweep", "run a scenario across parameter values");
  add_common(cmd_sweep, true);
  cmd_sweep->add_option("--axis", axis, "parameter to sweep: t, d, alpha, beta, mu, epsilon, N")
      ->required();
  cmd_sweep->add_option("--values", values_csv, "comma-separated values")->required();

  auto* cmd_examples = app.add_subcommand("examples", "list built-in scenarios");

  auto* cmd_validate = app.add_subcommand("validate", "check coefficient assumptions only");
  add_common(cmd_validate, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_examples->parsed()) {
      for (const auto& [name, desc] : dgb::builtin_scenarios())
        std::cout << name << "  -  " << desc << "\n";
      return 0;
    }

    dgb::CliOverrides ov = make_overrides(
        out_dir, seed, cmd_run->count("--seed") || cmd_sweep->count("--seed") ||
                           cmd_validate->count("--seed"),
        threads, cmd_run->count("--threads") || cmd_sweep->count("--threads") ||
                     cmd_validate->count("--threads"),
        slack, cmd_run->count("--slack") || cmd_sweep->count("--slack") ||
                   cmd_validate->count("--slack"));

    dgb::RunOutcome outcome;
    if (cmd_run->parsed()) {
      outcome = dgb::run(config, ov);
    } else if (cmd_sweep->parsed()) {
      outcome = dgb::sweep(config, axis, parse_values(values_csv), ov);
    } else {
      ov.force_validate_only = true;
      outcome = dgb::run(config, ov);
    }
    std::cout << (outcome.overall_pass ? "PASS" : "FAIL") << "  report: "
              << outcome.report_path << "\n";
    return outcome.exit_code;
  } catch (const dgb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
