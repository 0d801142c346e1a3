#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "pcoord/config.hpp"

namespace pcoord::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfigError = 2;

// Command-line values that beat the config file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  std::optional<double> arrival_rate;
  std::optional<double> p;
  std::optional<double> q;

  // Throws ConfigError if the result is invalid.
  void apply(ScenarioConfig& c) const;
};

struct RunOptions {
  std::string config;  // file or preset name
  ConfigOverrides overrides;
  std::string trace_path;    // empty: no trace
  std::string metrics_path;  // empty: summary on `out`
  int batch = 1;             // consecutive seeds from the configured one
  int jobs = 0;              // worker threads, 0 = hardware concurrency
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

// Replays `trace_path` against the config (seed taken from the trace).
int cmd_verify(const std::string& trace_path, const std::string& config,
               const ConfigOverrides& overrides, std::ostream& out,
               std::ostream& err);

int cmd_summarize(const std::string& trace_path, bool chart, bool json,
                  std::ostream& out, std::ostream& err);

// Trace file of one seed in a batch: "<stem>_<seed><ext>".
std::string batch_trace_path(const std::string& trace_path,
                             std::uint64_t seed);

}  // namespace pcoord::cli
