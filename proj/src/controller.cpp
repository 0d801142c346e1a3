#include "pcoord/controller.hpp"

#include <algorithm>

namespace pcoord {

bool wants_entry(const RobotState& s, const PathSpec& path,
                 const Kinodynamics& kin) {
  return x_stop(s, kin) > path.x_entry();
}

void PredictedTrajectory::set_track(RobotId id, Track track) {
  tracks_[id] = std::move(track);
}

std::optional<RobotState> PredictedTrajectory::at(RobotId id, int slot) const {
  const auto it = tracks_.find(id);
  if (it == tracks_.end()) return std::nullopt;
  const Track& t = it->second;
  const int k = slot - t.start_slot;
  if (k < 0) {
    throw ContractViolation("prediction of robot " + to_string(id) +
                            " queried before its start");
  }
  if (k >= static_cast<int>(t.states.size())) return std::nullopt;
  return t.states[static_cast<std::size_t>(k)];
}

int unobstructed_crossing_slots(const PathSpec& path, const Kinodynamics& kin) {
  RobotState s;
  int k = 0;
  while (s.x <= path.x_exit()) {
    s = step(s, kin.u_max, kin);
    ++k;
  }
  return k;
}

namespace {

// States of the requester at full throttle, up to and including the first
// one past x_exit.
std::vector<RobotState> throttle_track(RobotState s, const PathSpec& path,
                                       const Kinodynamics& kin) {
  std::vector<RobotState> out{s};
  while (out.back().x <= path.x_exit()) {
    out.push_back(step(out.back(), kin.u_max, kin));
  }
  return out;
}

}  // namespace

bool acceptable(const EntryRequest& request, const JointState& s, int slot,
                const ControllerState& state, const WorldModel& world,
                const ControllerOptions& options) {
  const RobotId r = request.robot;
  if (state.graph.contains(r)) {
    throw ContractViolation("robot " + to_string(r) + " is already accepted");
  }
  const RobotInfo& info = world.robot(r);
  const std::vector<RobotState> track =
      throttle_track(s.at(r), world.path(info.path), info.kin);

  // The newcomer gets the lowest priority: every accepted robot sharing a
  // section with it is a winner, and only those edges are new.
  std::vector<RobotId> winners;
  for (RobotId j : state.graph.vertices()) {
    if (!world.section_between(j, r).empty()) winners.push_back(j);
  }
  // The last entry of the track is already outside. Same checks as
  // brake_contact and worst_case_contact, sharing the trajectories.
  const Kinodynamics& kin_r = info.kin;
  const double eps = options.safety.geom_eps;
  const int samples = static_cast<int>(track.size()) - 1;
  for (int tau = 0; tau < samples; ++tau) {
    const RobotState& sr = track[static_cast<std::size_t>(tau)];
    const double brake_reach = brake_stop(sr, kin_r);
    const double worst_reach = x_stop(sr, kin_r);
    std::optional<Trajectory> r_brake;
    std::optional<Trajectory> r_worst;
    bool any = false;
    for (RobotId j : winners) {
      std::optional<RobotState> sj;
      if (tau == 0) {
        sj = s.at(j);
      } else {
        sj = state.predicted.at(j, slot + tau);
      }
      if (!sj) continue;
      any = true;
      const PairSection& sec = world.section_between(j, r);
      const bool check_brake =
          in_shifted_obstacle(sec, Axis::kFirst, sj->x, brake_reach, eps);
      const bool check_worst =
          options.strict_acceptance &&
          in_shifted_obstacle(sec, Axis::kFirst, sj->x, worst_reach, eps);
      if (!check_brake && !check_worst) continue;
      const Kinodynamics& kin_j = world.robot(j).kin;
      const Trajectory tj(*sj, ControlSequence::constant(kin_j.u_min, kin_j),
                          kin_j);
      if (check_brake) {
        if (!r_brake) {
          r_brake.emplace(sr, ControlSequence::constant(kin_r.u_min, kin_r),
                          kin_r);
        }
        if (first_shifted_contact(sec, Axis::kFirst, tj, *r_brake,
                                  std::max(tj.last_slot(), r_brake->last_slot()),
                                  options.safety)) {
          return false;
        }
      }
      if (check_worst) {
        if (!r_worst) {
          r_worst.emplace(sr, ControlSequence::impulse(kin_r), kin_r);
        }
        if (first_shifted_contact(sec, Axis::kFirst, tj, *r_worst,
                                  std::max(tj.last_slot(), r_worst->last_slot()),
                                  options.safety)) {
          return false;
        }
      }
    }
    if (!any && tau > 0) break;
  }
  return true;
}

std::vector<RequestOutcome> process_requests(
    std::vector<EntryRequest> pending, const JointState& s, int slot,
    ControllerState& state, const WorldModel& world,
    const ControllerOptions& options) {
  std::sort(pending.begin(), pending.end(),
            [](const EntryRequest& a, const EntryRequest& b) {
              if (a.slot != b.slot) return a.slot < b.slot;
              return a.robot < b.robot;
            });
  std::vector<RequestOutcome> out;
  for (const EntryRequest& req : pending) {
    const bool ok = acceptable(req, s, slot, state, world, options);
    out.push_back({req.robot, ok});
    if (!ok) continue;
    state.graph = add_lowest_priority(state.graph, req.robot, world);
    const RobotInfo& info = world.robot(req.robot);
    std::vector<RobotState> track =
        throttle_track(s.at(req.robot), world.path(info.path), info.kin);
    track.pop_back();
    state.predicted.set_track(req.robot, {slot, std::move(track)});
  }
  return out;
}

void update_predictions(const JointState& s, int slot, ControllerState& state,
                        const WorldModel& world,
                        const ControllerOptions& options) {
  JointState accepted;
  for (RobotId id : state.graph.vertices()) accepted.emplace(id, s.at(id));
  ClosedLoopOptions cl;
  cl.prune_at_exit = true;
  cl.safety = options.safety;
  const ClosedLoopTrajectory flow = closed_loop_flow(
      accepted, state.graph, world, options.prediction_limit, nullptr, cl);
  if (!flow.states().back().empty()) {
    throw LivenessError(
        "prediction at slot " + std::to_string(slot) + ": " +
        std::to_string(flow.states().back().size()) +
        " robots still inside after " +
        std::to_string(options.prediction_limit) + " slots");
  }
  state.predicted.clear();
  std::map<RobotId, PredictedTrajectory::Track> tracks;
  for (const JointState& js : flow.states()) {
    for (const auto& [id, st] : js) {
      auto& t = tracks[id];
      t.start_slot = slot;
      t.states.push_back(st);
    }
  }
  for (auto& [id, t] : tracks) state.predicted.set_track(id, std::move(t));
  state.predicted.set_last_update(slot);
}

std::vector<RobotId> prune_exited(const JointState& s, ControllerState& state,
                                  const WorldModel& world) {
  std::vector<RobotId> out;
  for (RobotId id : state.graph.vertices()) {
    const double exit = world.path(world.robot(id).path).x_exit();
    if (s.at(id).x > exit) out.push_back(id);
  }
  for (RobotId id : out) {
    state.graph = remove_vertex(state.graph, id);
    state.predicted.erase(id);
  }
  return out;
}

}  // namespace pcoord
