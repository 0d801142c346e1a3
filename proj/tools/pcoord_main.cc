// Command-line front end: run scenarios, verify traces, summarize traces.

#include <iostream>

#include <CLI11.hpp>

#include "pcoord/cli.hpp"

namespace {

void add_overrides(CLI::App* cmd, pcoord::cli::ConfigOverrides& o) {
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--horizon", o.horizon, "Number of slots");
  cmd->add_option("--arrival-rate", o.arrival_rate,
                  "Arrivals per slot and path");
  cmd->add_option("--p", o.p, "Probability of switching to the braking regime");
  cmd->add_option("--q", o.q, "Probability of leaving the braking regime");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Priority-based intersection coordination simulator"};
  app.require_subcommand(1);

  pcoord::cli::RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario");
  run_cmd->add_option("--config", run.config, "Config file or preset name")
      ->required();
  run_cmd->add_option("--trace", run.trace_path, "JSONL trace output");
  run_cmd->add_option("--metrics", run.metrics_path, "Metrics JSON output");
  run_cmd->add_option("--batch", run.batch, "Run N consecutive seeds");
  run_cmd->add_option("--jobs", run.jobs, "Worker threads for --batch");
  add_overrides(run_cmd, run.overrides);

  std::string trace;
  std::string config;
  pcoord::cli::ConfigOverrides verify_overrides;
  auto* verify_cmd = app.add_subcommand("verify", "Replay a trace through the monitors");
  verify_cmd->add_option("--trace", trace, "JSONL trace")->required();
  verify_cmd->add_option("--config", config, "Config file or preset name")
      ->required();
  add_overrides(verify_cmd, verify_overrides);

  bool chart = false;
  bool json = false;
  auto* summarize_cmd = app.add_subcommand("summarize", "Statistics of a trace");
  summarize_cmd->add_option("--trace", trace, "JSONL trace")->required();
  summarize_cmd->add_flag("--chart", chart, "Append an occupancy chart");
  summarize_cmd->add_flag("--json", json, "Print metrics as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pcoord::cli::kExitConfigError;
  }

  if (*run_cmd) return pcoord::cli::cmd_run(run, std::cout, std::cerr);
  if (*verify_cmd) {
    return pcoord::cli::cmd_verify(trace, config, verify_overrides, std::cout,
                                   std::cerr);
  }
  return pcoord::cli::cmd_summarize(trace, chart, json, std::cout, std::cerr);
}
