#include "pcoord/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace pcoord {

RandomStream::RandomStream(std::uint64_t seed, Tag tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  engine_.seed(seq);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::optional<double> spawn_position(const std::vector<double>& positions,
                                     double diameter) {
  double x = 0.0;
  if (!positions.empty()) {
    const double rear = *std::min_element(positions.begin(), positions.end());
    if (rear <= diameter) x = rear - diameter;
  }
  // rear - D may round to a gap just under D.
  for (double p : positions) {
    if (std::abs(p - x) < diameter - kGeomEpsilon) return std::nullopt;
  }
  return x;
}

void regime_step(RandomStream& rng, std::vector<Regime*> regimes, double p,
                 double q) {
  for (Regime* r : regimes) {
    if (*r == Regime::kControlled) {
      if (rng.bernoulli(p)) *r = Regime::kBraking;
    } else {
      if (rng.bernoulli(q)) *r = Regime::kControlled;
    }
  }
}

int exit_code(RunStatus s) { return s == RunStatus::kOk ? 0 : 1; }

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kViolation: return "violation";
    case RunStatus::kLiveness: return "liveness";
  }
  return "ok";
}

namespace {

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, TraceSink* sink)
      : config_(config),
        paths_(build_paths(config)),
        world_(paths_, Footprint(config.footprint_diameter)),
        arrivals_(config.seed, RandomStream::Tag::kArrivals),
        regimes_(config.seed, RandomStream::Tag::kRegimes),
        sink_(sink) {
    options_.safety.n_sub = config.n_sub;
    options_.strict_acceptance = config.strict_acceptance;
    options_.update_period = config.update_period;
    int crossing = 0;
    for (const PathSpec& p : paths_) {
      crossing = std::max(crossing, unobstructed_crossing_slots(p, config.kin));
    }
    crossing_slots_ = crossing;
    options_.prediction_limit = 10 * crossing;
    if (config.monitors) {
      monitor_.emplace(paths_, config.footprint_diameter);
    }
    first_accepted_.resize(config.overrides.size());
  }

  RunResult run();

 private:
  TraceHeader header() const;
  void emit_header();
  void emit_slot(const SlotRecord& rec);
  void emit_footer(const RunResult& r);

  JointState accepted_states() const;
  JointState true_states() const;
  // Robot ids of each path, frontmost first.
  std::vector<std::vector<RobotId>> path_order() const;
  double queue_control(const SimRobot& r, const SimRobot* ahead) const;
  void apply_overrides(int slot, std::map<RobotId, double>& u);
  RobotStatus status_of(RobotId id) const;

  const ScenarioConfig& config_;
  std::vector<PathSpec> paths_;
  WorldModel world_;
  ControllerState ctl_;
  ControllerOptions options_;
  RandomStream arrivals_;
  RandomStream regimes_;
  TraceSink* sink_;
  std::optional<TraceMonitor> monitor_;
  int crossing_slots_ = 0;

  std::map<RobotId, SimRobot> robots_;
  std::map<RobotId, EntryRequest> pending_;
  std::uint32_t next_id_ = 0;
  std::vector<std::optional<RobotId>> first_accepted_;
};

TraceHeader Simulation::header() const {
  TraceHeader h;
  h.seed = config_.seed;
  h.config_hash = config_hash(config_);
  h.name = config_.name;
  h.n_sub = config_.n_sub;
  h.footprint = config_.footprint_diameter;
  h.kin = config_.kin;
  h.drain_after = config_.drain_after;
  for (const PathSpec& p : paths_) {
    h.paths.push_back({p.id(), p.x_entry(), p.x_exit()});
  }
  return h;
}

void Simulation::emit_header() {
  const TraceHeader h = header();
  if (sink_ != nullptr) sink_->on_header(h);
  if (monitor_) monitor_->on_header(h);
}

void Simulation::emit_slot(const SlotRecord& rec) {
  if (sink_ != nullptr) sink_->on_slot(rec);
  if (monitor_) monitor_->on_slot(rec);
}

void Simulation::emit_footer(const RunResult& r) {
  TraceFooter f;
  f.slots = r.slots;
  f.status = to_string(r.status);
  f.diagnostic = r.diagnostic;
  if (sink_ != nullptr) sink_->on_footer(f);
  if (monitor_) monitor_->on_footer(f);
}

JointState Simulation::accepted_states() const {
  JointState s;
  for (RobotId id : ctl_.graph.vertices()) s.emplace(id, robots_.at(id).state);
  return s;
}

JointState Simulation::true_states() const {
  JointState s;
  for (const auto& [id, r] : robots_) s.emplace(id, r.state);
  return s;
}

RobotStatus Simulation::status_of(RobotId id) const {
  if (ctl_.graph.contains(id)) return RobotStatus::kAccepted;
  if (pending_.count(id) != 0) return RobotStatus::kRequested;
  return RobotStatus::kQueued;
}

// Waiting robots: full throttle while they can still stop before x_entry and
// cannot be forced into the robot ahead of them; maximum brake otherwise.
double Simulation::queue_control(const SimRobot& r,
                                 const SimRobot* ahead) const {
  const Kinodynamics& kin = config_.kin;
  if (x_stop(r.state, kin) > paths_[r.path].x_entry()) return kin.u_min;
  if (ahead == nullptr || ahead->state.x <= r.state.x) return kin.u_max;
  const PairSection& same = world_.section(r.path, r.path);
  if (worst_case_contact(same, ahead->state, kin, r.state, kin,
                         options_.safety)) {
    return kin.u_min;
  }
  return kin.u_max;
}

std::vector<std::vector<RobotId>> Simulation::path_order() const {
  std::vector<std::vector<RobotId>> order(paths_.size());
  for (const auto& [id, r] : robots_) order[r.path].push_back(id);
  for (std::vector<RobotId>& ids : order) {
    std::stable_sort(ids.begin(), ids.end(), [&](RobotId a, RobotId b) {
      return robots_.at(a).state.x > robots_.at(b).state.x;
    });
  }
  return order;
}

void Simulation::apply_overrides(int slot, std::map<RobotId, double>& u) {
  for (std::size_t i = 0; i < config_.overrides.size(); ++i) {
    const ControlOverride& o = config_.overrides[i];
    if (slot < o.from || slot > o.to) continue;
    std::vector<RobotId> targets;
    switch (o.target) {
      case ControlOverride::Target::kAll:
        for (const auto& [id, v] : u) targets.push_back(id);
        break;
      case ControlOverride::Target::kFirstAccepted:
        if (!first_accepted_[i] && !ctl_.graph.vertices().empty()) {
          first_accepted_[i] = *ctl_.graph.vertices().begin();
        }
        if (first_accepted_[i]) targets.push_back(*first_accepted_[i]);
        break;
      case ControlOverride::Target::kIds:
        for (std::uint32_t id : o.ids) targets.push_back(static_cast<RobotId>(id));
        break;
    }
    for (RobotId id : targets) {
      const auto it = u.find(id);
      if (it == u.end()) continue;
      it->second = o.control == OverrideControl::kBrake ? config_.kin.u_min
                                                         : config_.kin.u_max;
    }
  }
}

RunResult Simulation::run() {
  RunResult result;
  emit_header();
  const Kinodynamics& kin = config_.kin;

  for (const InitialRobot& ir : config_.initial_robots) {
    const RobotId id = static_cast<RobotId>(next_id_++);
    const std::size_t path = *world_.path_index(ir.path);
    robots_[id] = {id, path, {ir.x, ir.v}, Regime::kControlled};
    world_.add_robot(id, path, kin);
  }
  std::optional<int> deadline;

  for (int k = 0;; ++k) {
    const bool drain = config_.drain_after && k >= *config_.drain_after;
    if (!config_.drain_after && k >= config_.horizon) {
      result.slots = k;
      break;
    }
    SlotRecord rec;
    rec.slot = k;
    if (k == 0) {
      for (const auto& [id, r] : robots_) rec.events.push_back({"spawn", id});
    }

    // Exits.
    std::vector<RobotRecord> exited;
    for (RobotId id : prune_exited(true_states(), ctl_, world_)) {
      const SimRobot& r = robots_.at(id);
      rec.events.push_back({"exit", id});
      exited.push_back({id, paths_[r.path].id(), r.state.x, r.state.v,
                        std::nullopt, r.regime, RobotStatus::kExited});
      world_.remove_robot(id);
      robots_.erase(id);
    }

    // Periodic prediction refresh.
    if (k % config_.update_period == 0 && !ctl_.graph.vertices().empty()) {
      try {
        update_predictions(accepted_states(), k, ctl_, world_, options_);
      } catch (const LivenessError& e) {
        result.status = RunStatus::kLiveness;
        result.diagnostic = e.what();
        result.slots = k;
        break;
      }
    }

    // Brake regimes of accepted robots.
    std::vector<Regime*> regimes;
    for (RobotId id : ctl_.graph.vertices()) {
      regimes.push_back(&robots_.at(id).regime);
    }
    if (drain) {
      for (Regime* r : regimes) *r = Regime::kControlled;
    } else {
      regime_step(regimes_, regimes, config_.p, config_.q);
    }

    // Arrivals.
    if (!drain) {
      for (std::size_t p = 0; p < paths_.size(); ++p) {
        if (!arrivals_.bernoulli(config_.rate_of(p))) continue;
        std::vector<double> on_path;
        for (const auto& [id, r] : robots_) {
          if (r.path == p) on_path.push_back(r.state.x);
        }
        const auto x = spawn_position(on_path, config_.footprint_diameter);
        if (!x) continue;
        const RobotId id = static_cast<RobotId>(next_id_++);
        robots_[id] = {id, p, {*x, 0.0}, Regime::kControlled};
        world_.add_robot(id, p, kin);
        rec.events.push_back({"spawn", id});
      }
    }
    if (config_.drain_after && k == *config_.drain_after) {
      deadline = k + kDrainCrossingsPerRobot * crossing_slots_ *
                         static_cast<int>(robots_.size());
    }

    // Entry requests: the frontmost waiting robot of each path.
    const std::vector<std::vector<RobotId>> order = path_order();
    for (std::size_t p = 0; p < paths_.size(); ++p) {
      const SimRobot* front = nullptr;
      for (RobotId id : order[p]) {
        if (ctl_.graph.contains(id)) continue;
        front = &robots_.at(id);
        break;
      }
      if (front == nullptr || pending_.count(front->id) != 0) continue;
      if (wants_entry(front->state, paths_[p], kin)) {
        pending_[front->id] = {front->id, k, p};
        rec.events.push_back({"request", front->id});
      }
    }
    if (!pending_.empty()) {
      std::vector<EntryRequest> requests;
      for (const auto& [id, req] : pending_) requests.push_back(req);
      JointState s = accepted_states();
      for (const auto& [id, req] : pending_) s.emplace(id, robots_.at(id).state);
      for (const RequestOutcome& o :
           process_requests(requests, s, k, ctl_, world_, options_)) {
        rec.events.push_back({o.accepted ? "accept" : "reject", o.robot});
        if (o.accepted) {
          pending_.erase(o.robot);
          robots_.at(o.robot).regime = Regime::kControlled;
        }
      }
    }

    // Controls.
    std::map<RobotId, double> u =
        control_law(accepted_states(), ctl_.graph, world_, options_.safety);
    for (auto& [id, value] : u) {
      if (robots_.at(id).regime == Regime::kBraking) value = kin.u_min;
    }
    for (const std::vector<RobotId>& ids : order) {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ctl_.graph.contains(ids[i])) continue;
        const SimRobot* ahead = i > 0 ? &robots_.at(ids[i - 1]) : nullptr;
        u[ids[i]] = queue_control(robots_.at(ids[i]), ahead);
      }
    }
    apply_overrides(k, u);

    rec.edges = ctl_.graph.edges();
    std::size_t next_exited = 0;
    for (const auto& [id, r] : robots_) {
      while (next_exited < exited.size() && exited[next_exited].id < id) {
        rec.robots.push_back(exited[next_exited++]);
      }
      rec.robots.push_back({id, paths_[r.path].id(), r.state.x, r.state.v,
                            u.at(id), r.regime, status_of(id)});
    }
    while (next_exited < exited.size()) {
      rec.robots.push_back(exited[next_exited++]);
    }
    emit_slot(rec);

    for (auto& [id, r] : robots_) r.state = step(r.state, u.at(id), kin);

    if (monitor_ && monitor_->failed()) {
      result.status = RunStatus::kViolation;
      result.diagnostic = monitor_->first_violation();
      result.slots = k + 1;
      break;
    }
    if (drain && robots_.empty()) {
      result.slots = k + 1;
      break;
    }
    if (deadline && k > *deadline) {
      result.status = RunStatus::kLiveness;
      result.diagnostic = "control area not drained by slot " +
                          std::to_string(*deadline);
      result.slots = k + 1;
      break;
    }
  }
  emit_footer(result);
  if (monitor_) {
    result.report = monitor_->report();
    if (result.status == RunStatus::kOk && monitor_->failed()) {
      result.status = RunStatus::kViolation;
      result.diagnostic = monitor_->first_violation();
    }
  }
  return result;
}

}  // namespace

RunResult run(const ScenarioConfig& config, TraceSink* sink) {
  Simulation sim(config, sink);
  return sim.run();
}

}  // namespace pcoord
