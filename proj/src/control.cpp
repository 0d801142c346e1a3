#include "pcoord/control.hpp"

#include <algorithm>
#include <cmath>

namespace pcoord {

ControlSequence worst_case_control(RobotId subject, RobotId robot,
                                   const Kinodynamics& kin) {
  if (robot == subject) return ControlSequence::impulse(kin);
  return ControlSequence::constant(kin.u_min, kin);
}

bool worst_case_contact(const PairSection& section, RobotState winner,
                        const Kinodynamics& winner_kin, RobotState loser,
                        const Kinodynamics& loser_kin,
                        const SafetyOptions& options) {
  if (section.empty()) return false;
  if (!in_shifted_obstacle(section, Axis::kFirst, winner.x,
                           x_stop(loser, loser_kin), options.geom_eps)) {
    return false;
  }
  const Trajectory tw(winner, ControlSequence::constant(winner_kin.u_min,
                                                        winner_kin),
                      winner_kin);
  const Trajectory tl(loser, ControlSequence::impulse(loser_kin), loser_kin);
  return first_shifted_contact(section, Axis::kFirst, tw, tl,
                               std::max(tw.last_slot(), tl.last_slot()),
                               options)
      .has_value();
}

double control_law_for(RobotId robot, const JointState& s,
                       const PriorityGraph& g, const WorldModel& world,
                       const SafetyOptions& options) {
  const auto self = s.find(robot);
  if (self == s.end() || !g.contains(robot)) {
    throw ContractViolation("robot " + to_string(robot) +
                            " is not covered by state and graph");
  }
  const Kinodynamics& kin = world.robot(robot).kin;
  const double reach = x_stop(self->second, kin);

  std::optional<Trajectory> worst;
  for (RobotId j : g.winners_of(robot)) {
    const auto sj = s.find(j);
    if (sj == s.end()) {
      throw ContractViolation("state does not cover robot " + to_string(j));
    }
    const PairSection& sec = world.section_between(j, robot);
    if (!in_shifted_obstacle(sec, Axis::kFirst, sj->second.x, reach,
                             options.geom_eps)) {
      continue;
    }
    if (!worst) {
      worst.emplace(self->second, worst_case_control(robot, robot, kin), kin);
    }
    const Kinodynamics& kin_j = world.robot(j).kin;
    const Trajectory brake(sj->second, worst_case_control(robot, j, kin_j),
                           kin_j);
    const int horizon = std::max(brake.last_slot(), worst->last_slot());
    if (first_shifted_contact(sec, Axis::kFirst, brake, *worst, horizon,
                              options)) {
      return kin.u_min;
    }
  }
  return kin.u_max;
}

ControlVector control_law(const JointState& s, const PriorityGraph& g,
                          const WorldModel& world,
                          const SafetyOptions& options) {
  ControlVector out;
  for (RobotId i : g.vertices()) {
    out.emplace(i, control_law_for(i, s, g, world, options));
  }
  return out;
}

JointState ClosedLoopTrajectory::at(double t, const WorldModel& world) const {
  if (states_.empty()) return {};
  if (!(t >= 0.0)) throw ContractViolation("closed-loop flow at t < 0");
  const int k = static_cast<int>(std::floor(t));
  if (k >= slots()) return states_.back();
  const double frac = t - k;
  if (frac == 0.0) return states_[static_cast<std::size_t>(k)];
  JointState out;
  for (const auto& [id, u] : controls_[static_cast<std::size_t>(k)]) {
    out.emplace(id, step(states_[static_cast<std::size_t>(k)].at(id), u,
                         world.robot(id).kin, frac));
  }
  return out;
}

ClosedLoopTrajectory closed_loop_flow(const JointState& s,
                                      const PriorityGraph& g,
                                      const WorldModel& world, int horizon,
                                      const ControlCaps* caps,
                                      const ClosedLoopOptions& options) {
  ClosedLoopTrajectory out;
  JointState state = s;
  PriorityGraph graph = g;
  for (int k = 0;; ++k) {
    if (options.prune_at_exit) {
      for (auto it = state.begin(); it != state.end();) {
        const double exit = world.path(world.robot(it->first).path).x_exit();
        if (it->second.x > exit) {
          if (graph.contains(it->first)) {
            graph = remove_vertex(graph, it->first);
          }
          it = state.erase(it);
        } else {
          ++it;
        }
      }
    }
    out.states_.push_back(state);
    if (k >= horizon || state.empty()) break;

    ControlVector u = control_law(state, graph, world, options.safety);
    if (caps != nullptr && static_cast<std::size_t>(k) < caps->size()) {
      for (const auto& [id, cap] : (*caps)[static_cast<std::size_t>(k)]) {
        const auto it = u.find(id);
        if (it == u.end()) continue;
        const Kinodynamics& kin = world.robot(id).kin;
        if (!(kin.u_min <= cap && cap <= kin.u_max)) {
          throw ContractViolation("control cap out of bounds for robot " +
                                  to_string(id));
        }
        it->second = std::min(it->second, cap);
      }
    }
    JointState next;
    for (const auto& [id, st] : state) {
      const auto it = u.find(id);
      if (it == u.end()) {
        throw ContractViolation("robot " + to_string(id) +
                                " is not covered by the graph");
      }
      next.emplace(id, step(st, it->second, world.robot(id).kin));
    }
    out.controls_.push_back(std::move(u));
    state = std::move(next);
  }
  return out;
}

}  // namespace pcoord
