#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pcoord/config.hpp"
#include "pcoord/controller.hpp"
#include "pcoord/monitor.hpp"
#include "pcoord/trace.hpp"

namespace pcoord {

// Independent random stream: mt19937_64 seeded from (seed, stream tag).
class RandomStream {
 public:
  enum class Tag : std::uint32_t { kArrivals = 1, kRegimes = 2 };
  RandomStream(std::uint64_t seed, Tag tag);
  // 53-bit uniform draw in [0, 1).
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

struct SimRobot {
  RobotId id{};
  std::size_t path = 0;
  RobotState state;
  Regime regime = Regime::kControlled;
};

// Spawn position for a new robot on a path holding robots at `positions`:
// 0, or one diameter behind the rearmost robot if that one is within a
// diameter of the origin. nullopt if that spot overlaps another robot.
std::optional<double> spawn_position(const std::vector<double>& positions,
                                     double diameter);

// Regime transitions for one slot, in robot order.
void regime_step(RandomStream& rng, std::vector<Regime*> regimes, double p,
                 double q);

enum class RunStatus { kOk, kViolation, kLiveness };

struct RunResult {
  RunStatus status = RunStatus::kOk;
  std::string diagnostic;
  int slots = 0;
  std::optional<VerifyReport> report;  // when monitors ran
};

int exit_code(RunStatus s);
std::string to_string(RunStatus s);

// Runs a scenario, streaming its records into `sink` (may be null). With
// config.monitors set, every slot is checked online and the run stops at the
// first violation.
RunResult run(const ScenarioConfig& config, TraceSink* sink);

}  // namespace pcoord
