#pragma once

#include <stdexcept>
#include <vector>

namespace pcoord {

// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Per-robot bounds. Time is measured in slots (one slot = one control
// period), so speeds are distance/slot and controls distance/slot^2.
struct Kinodynamics {
  double v_max = 0.5;
  double u_min = -0.025;
  double u_max = 0.025;

  // Throws ContractViolation unless u_min < 0 < u_max and v_max > 0.
  void validate() const;
  // Slots of maximal braking needed to stop from v_max.
  int full_brake_slots() const;
};

struct RobotState {
  double x = 0.0;
  double v = 0.0;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

// One control value per slot; after the last slot the final value is held.
// An empty sequence means zero control.
class ControlSequence {
 public:
  ControlSequence() = default;
  ControlSequence(std::vector<double> values, const Kinodynamics& kin);

  static ControlSequence constant(double u, const Kinodynamics& kin) {
    return ControlSequence({u}, kin);
  }
  // Maximum throttle for one slot, then maximum brake forever.
  static ControlSequence impulse(const Kinodynamics& kin) {
    return ControlSequence({kin.u_max, kin.u_min}, kin);
  }

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double at(std::size_t slot) const;
  // The sequence starting `slots` later.
  ControlSequence shifted(std::size_t slots) const;

 private:
  std::vector<double> values_;
};

// Exact integration of x' = v, v' = u * delta(u, v) over dt: velocity
// saturates at 0 and v_max and the position integral is split at the
// saturation instant. Throws ContractViolation unless
// u_min <= u <= u_max and 0 < dt <= 1.
RobotState step(RobotState s, double u, const Kinodynamics& kin,
                double dt = 1.0);

// Flow of a single robot under a slot-wise control sequence. Slot-boundary
// states are produced by iterating `step`, so any two flows through the same
// boundary state and controls agree bit for bit.
class Trajectory {
 public:
  Trajectory(RobotState start, ControlSequence controls, Kinodynamics kin);

  const Kinodynamics& kinodynamics() const { return kin_; }
  RobotState start() const { return boundaries_.front(); }
  RobotState at(double t) const;
  RobotState at_slot(int k) const;
  double x_at(double t) const { return at(t).x; }
  double control(int k) const;
  // Last cached slot boundary. From there on the held control no longer
  // changes the velocity (at rest while braking, at v_max while throttling,
  // or zero control) unless `steady()` is false.
  int last_slot() const { return static_cast<int>(boundaries_.size()) - 1; }
  bool steady() const { return steady_; }
  // Furthest position ever reached, +inf if the robot never stops.
  double max_x() const;

 private:
  ControlSequence controls_;
  Kinodynamics kin_;
  std::vector<RobotState> boundaries_;
  bool steady_ = true;
};

Trajectory flow(RobotState s, ControlSequence controls,
                const Kinodynamics& kin);

// Furthest position reached under one slot of maximum throttle followed by
// maximum brake forever.
double x_stop(RobotState s, const Kinodynamics& kin);

// Rest position under maximum brake.
double brake_stop(RobotState s, const Kinodynamics& kin);

// Componentwise partial orders of the monotone system.
bool leq_state(const RobotState& a, const RobotState& b);
bool leq_control(const ControlSequence& a, const ControlSequence& b);

}  // namespace pcoord
