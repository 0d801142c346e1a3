#include "pcoord/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "pcoord/metrics.hpp"
#include "pcoord/monitor.hpp"
#include "pcoord/simulator.hpp"
#include "pcoord/trace.hpp"

namespace pcoord::cli {

void ConfigOverrides::apply(ScenarioConfig& c) const {
  if (seed) c.seed = *seed;
  if (horizon) c.horizon = *horizon;
  if (arrival_rate) c.arrival_rate = *arrival_rate;
  if (p) c.p = *p;
  if (q) c.q = *q;
  c.validate();
}

std::string batch_trace_path(const std::string& trace_path,
                             std::uint64_t seed) {
  const std::filesystem::path p(trace_path);
  std::filesystem::path out = p.parent_path() / p.stem();
  out += "_" + std::to_string(seed);
  out += p.extension();
  return out.string();
}

namespace {

struct SeedOutcome {
  std::uint64_t seed = 0;
  RunResult result;
  Metrics metrics;
  std::string error;  // trace file problems
};

SeedOutcome run_one(ScenarioConfig config, const std::string& trace_path) {
  SeedOutcome o;
  o.seed = config.seed;
  MetricsCollector metrics;
  std::ofstream file;
  std::optional<JsonlTraceWriter> writer;
  std::vector<TraceSink*> sinks{&metrics};
  if (!trace_path.empty()) {
    file.open(trace_path);
    if (!file) {
      o.error = "cannot write trace " + trace_path;
      return o;
    }
    writer.emplace(file);
    sinks.push_back(&*writer);
  }
  TeeSink tee(sinks);
  o.result = run(config, &tee);
  o.metrics = metrics.metrics();
  return o;
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  try {
    config = resolve_config(options.config);
    options.overrides.apply(config);
    if (options.batch < 1) throw ConfigError("--batch must be at least 1");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(options.batch));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < outcomes.size(); i = next++) {
      ScenarioConfig c = config;
      c.seed = config.seed + i;
      std::string trace = options.trace_path;
      if (!trace.empty() && options.batch > 1) {
        trace = batch_trace_path(trace, c.seed);
      }
      outcomes[i] = run_one(std::move(c), trace);
    }
  };
  unsigned jobs = options.jobs > 0 ? static_cast<unsigned>(options.jobs)
                                   : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(options.batch));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  int code = kExitOk;
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  for (const SeedOutcome& o : outcomes) {
    if (!o.error.empty()) {
      err << o.error << '\n';
      code = std::max(code, kExitConfigError);
      continue;
    }
    if (o.result.status != RunStatus::kOk) {
      err << "seed " << o.seed << ": " << to_string(o.result.status) << ": "
          << o.result.diagnostic << '\n';
      code = std::max(code, kExitViolation);
    }
    all.push_back(metrics_to_json(o.metrics));
  }
  if (!options.metrics_path.empty()) {
    std::ofstream file(options.metrics_path);
    if (!file) {
      err << "cannot write metrics " << options.metrics_path << '\n';
      return kExitConfigError;
    }
    file << (options.batch == 1 && !all.empty() ? all[0] : all).dump(2)
         << '\n';
  } else {
    for (const SeedOutcome& o : outcomes) {
      if (o.error.empty()) out << summary_text(o.metrics, false);
    }
  }
  return code;
}

int cmd_verify(const std::string& trace_path, const std::string& config_name,
               const ConfigOverrides& overrides, std::ostream& out,
               std::ostream& err) {
  ScenarioConfig config;
  std::uint64_t recorded_hash = 0;
  try {
    config = resolve_config(config_name);
    std::ifstream in(trace_path);
    if (!in) throw ConfigError("cannot read trace " + trace_path);
    std::string first;
    std::getline(in, first);
    const auto header = nlohmann::json::parse(first, nullptr, false);
    if (header.is_discarded() || !header.contains("seed") ||
        !header.contains("config_hash")) {
      throw ConfigError("trace has no valid header");
    }
    ConfigOverrides o = overrides;
    o.seed = header.at("seed").get<std::uint64_t>();
    o.apply(config);
    recorded_hash = header.at("config_hash").get<std::uint64_t>();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    err << "trace error: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (recorded_hash != config_hash(config)) {
    err << "config error: trace was produced by a different config\n";
    return kExitConfigError;
  }
  std::ifstream in(trace_path);
  VerifyReport report;
  try {
    report = verify_trace(in, build_paths(config), config.footprint_diameter);
  } catch (const TraceError& e) {
    err << "trace error: " << e.what() << '\n';
    return kExitConfigError;
  }
  out << report.to_text();
  if (!report.passed()) {
    const MonitorResult* f = report.first_failure();
    err << "violation: " << f->name << " at slot " << f->slot.value_or(-1)
        << ": " << f->detail << '\n';
    return kExitViolation;
  }
  return kExitOk;
}

int cmd_summarize(const std::string& trace_path, bool chart, bool json,
                  std::ostream& out, std::ostream& err) {
  std::ifstream in(trace_path);
  if (!in) {
    err << "cannot read trace " << trace_path << '\n';
    return kExitConfigError;
  }
  MetricsCollector metrics;
  if (in.peek() == std::char_traits<char>::eof()) {
    metrics.on_header({});
    metrics.on_footer({});
  } else try {
    read_trace(in, metrics);
  } catch (const TraceError& e) {
    err << "trace error: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (json) {
    out << metrics_to_json(metrics.metrics()).dump(2) << '\n';
  } else {
    out << summary_text(metrics.metrics(), chart);
  }
  return kExitOk;
}

}  // namespace pcoord::cli
