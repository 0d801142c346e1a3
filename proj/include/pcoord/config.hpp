#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pcoord/dynamics.hpp"
#include "pcoord/geometry.hpp"
#include "pcoord/priority.hpp"

namespace pcoord {

// Malformed or inconsistent scenario.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigSchemaVersion = 1;

struct PathConfig {
  std::string id;
  Vec2 origin;
  Vec2 direction;  // normalized on load
  double length = 0.0;
  std::optional<double> x_entry;  // derived from the sections when absent
  std::optional<double> x_exit;
  std::optional<double> arrival_rate;  // overrides the scenario rate
};

struct InitialRobot {
  std::string path;
  double x = 0.0;
  double v = 0.0;
};

enum class OverrideControl { kBrake, kThrottle };

// Scripted controls for slots [from, to]. kBrake caps the law output at
// u_min (always admissible); kThrottle forces u_max regardless of the law and
// exists to exercise the monitors.
struct ControlOverride {
  int from = 0;
  int to = 0;
  enum class Target { kAll, kFirstAccepted, kIds } target = Target::kAll;
  std::vector<std::uint32_t> ids;
  OverrideControl control = OverrideControl::kBrake;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double footprint_diameter = 1.0;
  Kinodynamics kin;
  std::vector<PathConfig> paths;
  double entry_offset = 6.0;
  double exit_offset = 6.0;
  double arrival_rate = 0.0;
  double p = 0.05;
  double q = 0.3;
  int horizon = 1000;
  std::uint64_t seed = 1;
  int update_period = 20;
  int n_sub = 16;
  // After this slot: no arrivals, no brake regimes, and the run continues
  // until the area is empty or the drain deadline passes.
  std::optional<int> drain_after;
  std::vector<InitialRobot> initial_robots;
  std::vector<ControlOverride> overrides;
  bool strict_acceptance = true;
  bool monitors = true;

  void validate() const;
  double rate_of(std::size_t path) const;
};

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ScenarioConfig& c);
ScenarioConfig load_config(const std::filesystem::path& file);

// Directory of the shipped presets.
std::filesystem::path preset_dir();
// A file path, or the name of a shipped preset.
ScenarioConfig resolve_config(const std::string& path_or_preset);

// FNV-1a of the canonical JSON of the config with the seed removed.
std::uint64_t config_hash(const ScenarioConfig& c);

// Paths with entry/exit derived from the crossing sections: the extent of
// all sections on a path, widened by the offsets and clipped to the path.
std::vector<PathSpec> build_paths(const ScenarioConfig& c);

}  // namespace pcoord
