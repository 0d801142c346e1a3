#pragma once

#include <map>
#include <vector>

#include "pcoord/dynamics.hpp"
#include "pcoord/priority.hpp"

namespace pcoord {

using ControlVector = std::map<RobotId, double>;

// Component of the worst-case vectorial control with respect to `subject`:
// the subject applies the impulse control, everyone else brakes.
ControlSequence worst_case_control(RobotId subject, RobotId robot,
                                   const Kinodynamics& kin);

// True when the worst-case flow with respect to `loser` (loser impulse,
// winner braking) meets the shifted obstacle of `winner` over `loser`.
bool worst_case_contact(const PairSection& section, RobotState winner,
                        const Kinodynamics& winner_kin, RobotState loser,
                        const Kinodynamics& loser_kin,
                        const SafetyOptions& options = {});

// Priority-preserving law for one robot: maximum brake if, for some winner j
// of `robot`, the worst-case flow with respect to `robot` meets the shifted
// obstacle of j over `robot`; maximum throttle otherwise.
double control_law_for(RobotId robot, const JointState& s,
                       const PriorityGraph& g, const WorldModel& world,
                       const SafetyOptions& options = {});

// The law for every vertex of `g`. Throws ContractViolation if `s` misses a
// vertex.
ControlVector control_law(const JointState& s, const PriorityGraph& g,
                          const WorldModel& world,
                          const SafetyOptions& options = {});

// Per-slot upper bounds on the applied control; a missing slot or robot
// leaves the law output untouched.
using ControlCaps = std::vector<ControlVector>;

struct ClosedLoopOptions {
  // Drop robots (and their vertices) once they pass x_exit of their path.
  bool prune_at_exit = false;
  SafetyOptions safety;
};

// Slot-wise record of a closed-loop flow. states[k] is the joint state at
// slot boundary k, controls[k] the controls applied during slot k.
class ClosedLoopTrajectory {
 public:
  const std::vector<JointState>& states() const { return states_; }
  const std::vector<ControlVector>& controls() const { return controls_; }
  int slots() const { return static_cast<int>(controls_.size()); }
  // Joint state at time t, for the robots present during slot floor(t).
  JointState at(double t, const WorldModel& world) const;

 private:
  friend ClosedLoopTrajectory closed_loop_flow(const JointState&,
                                               const PriorityGraph&,
                                               const WorldModel&, int,
                                               const ControlCaps*,
                                               const ClosedLoopOptions&);
  std::vector<JointState> states_;
  std::vector<ControlVector> controls_;
};

// Iterates: law at the slot boundary, componentwise minimum with the caps of
// that slot, one exact slot of dynamics. Stops after `horizon` slots or when
// no robot is left.
ClosedLoopTrajectory closed_loop_flow(const JointState& s,
                                      const PriorityGraph& g,
                                      const WorldModel& world, int horizon,
                                      const ControlCaps* caps = nullptr,
                                      const ClosedLoopOptions& options = {});

}  // namespace pcoord
