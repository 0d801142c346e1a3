#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pcoord/dynamics.hpp"
#include "pcoord/geometry.hpp"

namespace pcoord {

enum class RobotId : std::uint32_t {};

inline std::uint32_t to_int(RobotId id) {
  return static_cast<std::uint32_t>(id);
}

std::string to_string(RobotId id);

using JointState = std::map<RobotId, RobotState>;
using Configuration = std::map<RobotId, double>;

struct RobotInfo {
  std::size_t path = 0;
  Kinodynamics kin;
};

// Paths, footprint, the section of every path pair (computed once), and the
// robots currently known to the coordinator.
class WorldModel {
 public:
  WorldModel(std::vector<PathSpec> paths, Footprint footprint);

  std::size_t path_count() const { return paths_.size(); }
  const PathSpec& path(std::size_t index) const { return paths_.at(index); }
  const std::vector<PathSpec>& paths() const { return paths_; }
  std::optional<std::size_t> path_index(const std::string& id) const;
  const Footprint& footprint() const { return footprint_; }

  // Section of the path pair with axes (x_on_a, x_on_b).
  const PairSection& section(std::size_t path_a, std::size_t path_b) const {
    return sections_[path_a * paths_.size() + path_b];
  }
  // Section of the robot pair with axes (x_a, x_b).
  const PairSection& section_between(RobotId a, RobotId b) const;

  void add_robot(RobotId id, std::size_t path, const Kinodynamics& kin);
  void remove_robot(RobotId id);
  bool has_robot(RobotId id) const { return robots_.count(id) != 0; }
  const RobotInfo& robot(RobotId id) const;

 private:
  std::vector<PathSpec> paths_;
  Footprint footprint_;
  std::vector<PairSection> sections_;
  std::unordered_map<RobotId, RobotInfo> robots_;
};

// Directed "passes before" relation. Edge (w, l) means robot w has priority
// over robot l.
class PriorityGraph {
 public:
  using Edge = std::pair<RobotId, RobotId>;

  PriorityGraph() = default;
  // Raw construction, e.g. when replaying a recorded graph. Only checks that
  // edge endpoints are vertices and that there are no self-edges or opposite
  // edge pairs; acyclicity is left to `is_acyclic`.
  static PriorityGraph from_edges(const std::set<RobotId>& vertices,
                                  const std::vector<Edge>& edges);

  const std::set<RobotId>& vertices() const { return vertices_; }
  bool contains(RobotId id) const { return vertices_.count(id) != 0; }
  bool has_edge(RobotId winner, RobotId loser) const;
  // Lexicographically sorted.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;
  const std::set<RobotId>& winners_of(RobotId loser) const;
  const std::set<RobotId>& losers_of(RobotId winner) const;
  bool is_acyclic() const;

  friend PriorityGraph add_lowest_priority(const PriorityGraph& g,
                                           RobotId newcomer,
                                           const WorldModel& world);
  friend PriorityGraph remove_vertex(const PriorityGraph& g, RobotId id);

 private:
  std::set<RobotId> vertices_;
  std::map<RobotId, std::set<RobotId>> in_;
  std::map<RobotId, std::set<RobotId>> out_;
};

// Adds `newcomer` below every vertex it shares a non-empty section with.
PriorityGraph add_lowest_priority(const PriorityGraph& g, RobotId newcomer,
                                  const WorldModel& world);
PriorityGraph remove_vertex(const PriorityGraph& g, RobotId id);

// Every pair with a non-empty section carries exactly one edge.
bool is_complete(const PriorityGraph& g, const WorldModel& world);

// Continuous-time checking of flows against shifted obstacles.
//
// A slot [k, k+1] is cleared if the corner (winner at k, loser at k+1) is
// outside the shifted set: positions are non-decreasing, so every
// configuration of the slot is dominated by that corner. Otherwise the slot
// is sampled n_sub + 1 times and each sample is tested against the set grown
// by (v_max_w + v_max_l) / (2 n_sub), the largest drift of the center
// distance to the nearest sample.
struct SafetyOptions {
  int n_sub = 16;
  double geom_eps = kGeomEpsilon;
};

struct Contact {
  RobotId winner;
  RobotId loser;
  double time;
};

// First time in [0, horizon] (slots) at which the pair may be inside the
// shifted obstacle of `winner` over `loser`; nullopt if the pair is clear.
std::optional<double> first_shifted_contact(const PairSection& section,
                                            Axis winner_axis,
                                            const Trajectory& winner,
                                            const Trajectory& loser,
                                            int horizon,
                                            const SafetyOptions& options);

// First contact of the all-brake flows of a single winner/loser pair with the
// shifted obstacle of the winner.
std::optional<double> brake_contact(const PairSection& section,
                                    RobotState winner,
                                    const Kinodynamics& winner_kin,
                                    RobotState loser,
                                    const Kinodynamics& loser_kin,
                                    const SafetyOptions& options = {});

// Slots after which every robot of `s` rests under maximum brake.
int brake_horizon(const JointState& s, const WorldModel& world);

// True iff no edge's shifted obstacle contains the configuration (grown by
// `margin` on the diameter).
bool config_free(const Configuration& cfg, const PriorityGraph& g,
                 const WorldModel& world, double margin = kGeomEpsilon);

// Brake safety: the all-brake flow from `s` never meets a shifted obstacle of
// the graph, the terminal rest configuration included. Returns the first
// offending edge, if any. When `only` is set, just the edges incident to that
// robot are examined.
std::optional<Contact> brake_safety_violation(
    const JointState& s, const PriorityGraph& g, const WorldModel& world,
    const SafetyOptions& options = {},
    std::optional<RobotId> only = std::nullopt);

bool is_brake_safe(const JointState& s, const PriorityGraph& g,
                   const WorldModel& world, const SafetyOptions& options = {});

}  // namespace pcoord
