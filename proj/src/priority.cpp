#include "pcoord/priority.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace pcoord {

namespace {

const std::set<RobotId>& empty_set() {
  static const std::set<RobotId> kEmpty;
  return kEmpty;
}

const RobotState& state_of(const JointState& s, RobotId id) {
  const auto it = s.find(id);
  if (it == s.end()) {
    throw ContractViolation("state does not cover robot " + to_string(id));
  }
  return it->second;
}

}  // namespace

std::string to_string(RobotId id) { return std::to_string(to_int(id)); }

WorldModel::WorldModel(std::vector<PathSpec> paths, Footprint footprint)
    : paths_(std::move(paths)), footprint_(footprint) {
  const std::size_t n = paths_.size();
  sections_.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      sections_.push_back(pair_section(paths_[a], paths_[b], footprint_));
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (paths_[a].id() == paths_[b].id()) {
        throw GeometryError("duplicate path id " + paths_[a].id());
      }
    }
  }
}

std::optional<std::size_t> WorldModel::path_index(const std::string& id) const {
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    if (paths_[i].id() == id) return i;
  }
  return std::nullopt;
}

const PairSection& WorldModel::section_between(RobotId a, RobotId b) const {
  return section(robot(a).path, robot(b).path);
}

void WorldModel::add_robot(RobotId id, std::size_t path,
                           const Kinodynamics& kin) {
  if (path >= paths_.size()) throw ContractViolation("unknown path index");
  kin.validate();
  if (!robots_.emplace(id, RobotInfo{path, kin}).second) {
    throw ContractViolation("robot " + to_string(id) + " already registered");
  }
}

void WorldModel::remove_robot(RobotId id) {
  if (robots_.erase(id) == 0) {
    throw ContractViolation("robot " + to_string(id) + " is not registered");
  }
}

const RobotInfo& WorldModel::robot(RobotId id) const {
  const auto it = robots_.find(id);
  if (it == robots_.end()) {
    throw ContractViolation("robot " + to_string(id) + " is not registered");
  }
  return it->second;
}

PriorityGraph PriorityGraph::from_edges(const std::set<RobotId>& vertices,
                                        const std::vector<Edge>& edges) {
  PriorityGraph g;
  g.vertices_ = vertices;
  for (const auto& [w, l] : edges) {
    if (w == l) throw ContractViolation("self edge on " + to_string(w));
    if (!g.contains(w) || !g.contains(l)) {
      throw ContractViolation("edge endpoint is not a vertex");
    }
    if (g.has_edge(l, w)) {
      throw ContractViolation("both orientations present for " +
                              to_string(w) + "," + to_string(l));
    }
    g.out_[w].insert(l);
    g.in_[l].insert(w);
  }
  return g;
}

bool PriorityGraph::has_edge(RobotId winner, RobotId loser) const {
  const auto it = out_.find(winner);
  return it != out_.end() && it->second.count(loser) != 0;
}

std::vector<PriorityGraph::Edge> PriorityGraph::edges() const {
  std::vector<Edge> out;
  for (const auto& [w, losers] : out_) {
    for (RobotId l : losers) out.emplace_back(w, l);
  }
  return out;
}

std::size_t PriorityGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& [w, losers] : out_) n += losers.size();
  return n;
}

const std::set<RobotId>& PriorityGraph::winners_of(RobotId loser) const {
  const auto it = in_.find(loser);
  return it == in_.end() ? empty_set() : it->second;
}

const std::set<RobotId>& PriorityGraph::losers_of(RobotId winner) const {
  const auto it = out_.find(winner);
  return it == out_.end() ? empty_set() : it->second;
}

bool PriorityGraph::is_acyclic() const {
  std::map<RobotId, std::size_t> indegree;
  for (RobotId v : vertices_) indegree[v] = winners_of(v).size();
  std::deque<RobotId> ready;
  for (const auto& [v, d] : indegree) {
    if (d == 0) ready.push_back(v);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const RobotId v = ready.front();
    ready.pop_front();
    ++visited;
    for (RobotId l : losers_of(v)) {
      if (--indegree[l] == 0) ready.push_back(l);
    }
  }
  return visited == vertices_.size();
}

PriorityGraph add_lowest_priority(const PriorityGraph& g, RobotId newcomer,
                                  const WorldModel& world) {
  if (g.contains(newcomer)) {
    throw ContractViolation("robot " + to_string(newcomer) +
                            " already has a priority");
  }
  PriorityGraph out = g;
  out.vertices_.insert(newcomer);
  for (RobotId j : g.vertices_) {
    if (world.section_between(j, newcomer).empty()) continue;
    out.out_[j].insert(newcomer);
    out.in_[newcomer].insert(j);
  }
  if (!out.is_acyclic()) {
    throw ContractViolation("priority graph became cyclic");
  }
  return out;
}

PriorityGraph remove_vertex(const PriorityGraph& g, RobotId id) {
  if (!g.contains(id)) {
    throw ContractViolation("robot " + to_string(id) + " is not a vertex");
  }
  PriorityGraph out = g;
  out.vertices_.erase(id);
  for (RobotId w : g.winners_of(id)) out.out_[w].erase(id);
  for (RobotId l : g.losers_of(id)) out.in_[l].erase(id);
  out.in_.erase(id);
  out.out_.erase(id);
  return out;
}

bool is_complete(const PriorityGraph& g, const WorldModel& world) {
  // Opposite edges are impossible by construction, so every vertex pair has
  // at most one edge and counting suffices.
  std::vector<std::size_t> paths;
  paths.reserve(g.vertices().size());
  for (RobotId v : g.vertices()) paths.push_back(world.robot(v).path);
  std::size_t needed = 0;
  for (std::size_t a = 0; a < paths.size(); ++a) {
    for (std::size_t b = a + 1; b < paths.size(); ++b) {
      if (!world.section(paths[a], paths[b]).empty()) ++needed;
    }
  }
  std::size_t edges = 0;
  for (RobotId w : g.vertices()) {
    for (RobotId l : g.losers_of(w)) {
      if (world.section_between(w, l).empty()) return false;
      ++edges;
    }
  }
  return edges == needed;
}

std::optional<double> first_shifted_contact(const PairSection& section,
                                            Axis winner_axis,
                                            const Trajectory& winner,
                                            const Trajectory& loser,
                                            int horizon,
                                            const SafetyOptions& options) {
  if (section.empty()) return std::nullopt;
  const double eps = options.geom_eps;
  if (horizon <= 0) {
    if (in_shifted_obstacle(section, winner_axis, winner.x_at(0.0),
                            loser.x_at(0.0), eps)) {
      return 0.0;
    }
    return std::nullopt;
  }
  // The whole window is dominated by (winner at its start, loser at its end).
  if (!in_shifted_obstacle(section, winner_axis, winner.x_at(0.0),
                           loser.x_at(horizon), eps)) {
    return std::nullopt;
  }
  const int n = options.n_sub;
  const double drift = (winner.kinodynamics().v_max +
                        loser.kinodynamics().v_max) / (2.0 * n);
  for (int k = 0; k < horizon; ++k) {
    if (!in_shifted_obstacle(section, winner_axis, winner.at_slot(k).x,
                             loser.at_slot(k + 1).x, eps)) {
      continue;
    }
    for (int m = 0; m <= n; ++m) {
      const double t = k + static_cast<double>(m) / n;
      if (in_shifted_obstacle(section, winner_axis, winner.x_at(t),
                              loser.x_at(t), eps + drift)) {
        return t;
      }
    }
  }
  return std::nullopt;
}

std::optional<double> brake_contact(const PairSection& section,
                                    RobotState winner,
                                    const Kinodynamics& winner_kin,
                                    RobotState loser,
                                    const Kinodynamics& loser_kin,
                                    const SafetyOptions& options) {
  if (section.empty()) return std::nullopt;
  if (!in_shifted_obstacle(section, Axis::kFirst, winner.x,
                           brake_stop(loser, loser_kin), options.geom_eps)) {
    return std::nullopt;
  }
  const Trajectory tw(winner, ControlSequence::constant(winner_kin.u_min,
                                                        winner_kin),
                      winner_kin);
  const Trajectory tl(loser, ControlSequence::constant(loser_kin.u_min,
                                                       loser_kin),
                      loser_kin);
  return first_shifted_contact(section, Axis::kFirst, tw, tl,
                               std::max(tw.last_slot(), tl.last_slot()),
                               options);
}

int brake_horizon(const JointState& s, const WorldModel& world) {
  int h = 0;
  for (const auto& [id, st] : s) {
    const Kinodynamics& kin = world.robot(id).kin;
    h = std::max(h, static_cast<int>(std::ceil(st.v / -kin.u_min)));
  }
  return h;
}

bool config_free(const Configuration& cfg, const PriorityGraph& g,
                 const WorldModel& world, double margin) {
  for (const auto& [w, l] : g.edges()) {
    const auto xw = cfg.find(w);
    const auto xl = cfg.find(l);
    if (xw == cfg.end() || xl == cfg.end()) {
      throw ContractViolation("configuration does not cover the graph");
    }
    if (in_shifted_obstacle(world.section_between(w, l), Axis::kFirst,
                            xw->second, xl->second, margin)) {
      return false;
    }
  }
  return true;
}

std::optional<Contact> brake_safety_violation(const JointState& s,
                                              const PriorityGraph& g,
                                              const WorldModel& world,
                                              const SafetyOptions& options,
                                              std::optional<RobotId> only) {
  std::map<RobotId, Trajectory> brake;
  auto brake_flow = [&](RobotId id) -> const Trajectory& {
    auto it = brake.find(id);
    if (it == brake.end()) {
      const Kinodynamics& kin = world.robot(id).kin;
      it = brake
               .emplace(id, Trajectory(state_of(s, id),
                                       ControlSequence::constant(kin.u_min, kin),
                                       kin))
               .first;
    }
    return it->second;
  };

  auto check_edge = [&](RobotId w, RobotId l) -> std::optional<Contact> {
    const PairSection& sec = world.section_between(w, l);
    if (sec.empty()) return std::nullopt;
    const RobotState& sw = state_of(s, w);
    const RobotState& sl = state_of(s, l);
    if (!in_shifted_obstacle(sec, Axis::kFirst, sw.x,
                             brake_stop(sl, world.robot(l).kin),
                             options.geom_eps)) {
      return std::nullopt;
    }
    const Trajectory& tw = brake_flow(w);
    const Trajectory& tl = brake_flow(l);
    const int horizon = std::max(tw.last_slot(), tl.last_slot());
    if (auto t = first_shifted_contact(sec, Axis::kFirst, tw, tl, horizon,
                                       options)) {
      return Contact{w, l, *t};
    }
    return std::nullopt;
  };

  for (RobotId v : g.vertices()) state_of(s, v);
  if (only) {
    for (RobotId w : g.winners_of(*only)) {
      if (auto c = check_edge(w, *only)) return c;
    }
    for (RobotId l : g.losers_of(*only)) {
      if (auto c = check_edge(*only, l)) return c;
    }
    return std::nullopt;
  }
  for (const auto& [w, l] : g.edges()) {
    if (auto c = check_edge(w, l)) return c;
  }
  return std::nullopt;
}

bool is_brake_safe(const JointState& s, const PriorityGraph& g,
                   const WorldModel& world, const SafetyOptions& options) {
  return !brake_safety_violation(s, g, world, options).has_value();
}

}  // namespace pcoord
