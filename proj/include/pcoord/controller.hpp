#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pcoord/control.hpp"
#include "pcoord/priority.hpp"

namespace pcoord {

// The controller could not predict every accepted robot out of the control
// area within its horizon.
class LivenessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EntryRequest {
  RobotId robot;
  int slot = 0;  // slot of the first request
  std::size_t path = 0;
};

// Entry condition: the robot can no longer be sure to stop before x_entry.
bool wants_entry(const RobotState& s, const PathSpec& path,
                 const Kinodynamics& kin);

// Predicted slot-boundary states of the accepted robots. A track ends with
// the last state before the robot passes x_exit.
class PredictedTrajectory {
 public:
  struct Track {
    int start_slot = 0;
    std::vector<RobotState> states;
  };

  void set_track(RobotId id, Track track);
  void erase(RobotId id) { tracks_.erase(id); }
  void clear() { tracks_.clear(); }
  bool covers(RobotId id) const { return tracks_.count(id) != 0; }
  // nullopt once the robot is predicted to have left.
  std::optional<RobotState> at(RobotId id, int slot) const;
  const std::map<RobotId, Track>& tracks() const { return tracks_; }
  int last_update() const { return last_update_; }
  void set_last_update(int slot) { last_update_ = slot; }

 private:
  std::map<RobotId, Track> tracks_;
  int last_update_ = 0;
};

struct ControllerOptions {
  SafetyOptions safety;
  // Also require the law to keep the requester at full throttle along the
  // whole virtual trajectory.
  bool strict_acceptance = true;
  int update_period = 20;
  // Longest prediction, in slots.
  int prediction_limit = 1000;
};

// The accepted set is the vertex set of `graph`.
struct ControllerState {
  PriorityGraph graph;
  PredictedTrajectory predicted;
};

// Slots from rest at coordinate 0 to strictly past x_exit under maximum
// throttle.
int unobstructed_crossing_slots(const PathSpec& path, const Kinodynamics& kin);

// Virtual-trajectory test for one request at `slot`; `s` holds the true
// states of the requester and every accepted robot.
bool acceptable(const EntryRequest& request, const JointState& s, int slot,
                const ControllerState& state, const WorldModel& world,
                const ControllerOptions& options);

struct RequestOutcome {
  RobotId robot;
  bool accepted = false;
};

// Handles `pending` by first request slot, then robot id. Accepted robots
// join the graph with lowest priority and get a full-throttle prediction.
std::vector<RequestOutcome> process_requests(
    std::vector<EntryRequest> pending, const JointState& s, int slot,
    ControllerState& state, const WorldModel& world,
    const ControllerOptions& options);

// Recomputes the closed-loop prediction of every accepted robot from the
// true state. Throws LivenessError if some robot is still inside after
// options.prediction_limit slots.
void update_predictions(const JointState& s, int slot, ControllerState& state,
                        const WorldModel& world,
                        const ControllerOptions& options);

// Removes accepted robots past x_exit from the graph and the predictions.
std::vector<RobotId> prune_exited(const JointState& s, ControllerState& state,
                                  const WorldModel& world);

}  // namespace pcoord
