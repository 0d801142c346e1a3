#include "pcoord/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcoord/control.hpp"
#include "pcoord/controller.hpp"

namespace pcoord {

namespace {

const char* const kMonitorNames[] = {"collision",  "priority", "brake_safety",
                                     "control_bound", "kinematics", "graph",
                                     "entry",      "liveness"};

std::string id_str(RobotId id) { return "robot " + to_string(id); }

bool is_live(const RobotRecord& r) { return r.status != RobotStatus::kExited; }

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(monitors.begin(), monitors.end(),
                     [](const MonitorResult& m) { return m.passed; });
}

const MonitorResult* VerifyReport::first_failure() const {
  const MonitorResult* best = nullptr;
  for (const MonitorResult& m : monitors) {
    if (m.passed) continue;
    if (best == nullptr || m.slot.value_or(0) < best->slot.value_or(0)) {
      best = &m;
    }
  }
  return best;
}

const MonitorResult& VerifyReport::get(const std::string& name) const {
  for (const MonitorResult& m : monitors) {
    if (m.name == name) return m;
  }
  throw std::out_of_range("no monitor named " + name);
}

nlohmann::ordered_json VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["passed"] = passed();
  nlohmann::ordered_json ms = nlohmann::ordered_json::array();
  for (const MonitorResult& m : monitors) {
    nlohmann::ordered_json mj;
    mj["name"] = m.name;
    mj["passed"] = m.passed;
    mj["checks"] = m.checks;
    mj["slot"] = m.slot ? nlohmann::ordered_json(*m.slot)
                        : nlohmann::ordered_json(nullptr);
    mj["detail"] = m.detail;
    ms.push_back(std::move(mj));
  }
  j["monitors"] = std::move(ms);
  return j;
}

std::string VerifyReport::to_text() const {
  std::ostringstream out;
  for (const MonitorResult& m : monitors) {
    out << (m.passed ? "pass " : "FAIL ") << m.name << " (" << m.checks
        << " checks)";
    if (!m.passed) out << " at slot " << m.slot.value_or(-1) << ": " << m.detail;
    out << '\n';
  }
  return out.str();
}

TraceMonitor::TraceMonitor(std::vector<PathSpec> paths, double footprint)
    : paths_(paths), footprint_(footprint), world_(paths, Footprint(footprint)) {
  for (const char* name : kMonitorNames) report_.monitors.push_back({name, true, 0, std::nullopt, {}});
}

MonitorResult& TraceMonitor::result(const std::string& name) {
  for (MonitorResult& m : report_.monitors) {
    if (m.name == name) return m;
  }
  throw std::logic_error("unknown monitor " + name);
}

void TraceMonitor::fail(const std::string& name, int slot,
                        const std::string& detail) {
  MonitorResult& m = result(name);
  if (!m.passed) return;
  m.passed = false;
  m.slot = slot;
  m.detail = detail;
  if (!failed_) {
    failed_ = true;
    first_violation_ = name + ": slot " + std::to_string(slot) + ": " + detail;
  }
}

std::string TraceMonitor::first_violation() const { return first_violation_; }

void TraceMonitor::on_header(const TraceHeader& h) {
  header_ = h;
  have_header_ = true;
  if (h.paths.size() != paths_.size()) {
    throw TraceError("trace and config disagree on the number of paths");
  }
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    const PathSpec& p = paths_[i];
    const TracePath& t = h.paths[i];
    if (t.id != p.id() || std::abs(t.x_entry - p.x_entry()) > 1e-12 ||
        std::abs(t.x_exit - p.x_exit()) > 1e-12) {
      throw TraceError("trace and config disagree on path " + p.id());
    }
    crossing_slots_ =
        std::max(crossing_slots_, unobstructed_crossing_slots(p, h.kin));
  }
  if (std::abs(h.footprint - footprint_) > 1e-12) {
    throw TraceError("trace and config disagree on the footprint");
  }
}

void TraceMonitor::check_kinematics(const SlotRecord& s) {
  MonitorResult& m = result("kinematics");
  ++m.checks;
  if (s.slot != last_slot_ + 1) {
    fail("kinematics", s.slot,
         "slot follows " + std::to_string(last_slot_));
  }
  std::set<RobotId> spawned;
  std::set<RobotId> exiting;
  for (const TraceEvent& e : s.events) {
    if (e.type == "spawn") spawned.insert(e.robot);
    if (e.type == "exit") exiting.insert(e.robot);
  }
  std::map<RobotId, const RobotRecord*> now;
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    const RobotRecord& r = s.robots[i];
    if (i > 0 && !(s.robots[i - 1].id < r.id)) {
      fail("kinematics", s.slot, "robot records unsorted or duplicated");
    }
    now[r.id] = &r;
    if (exited_.count(r.id) != 0) {
      fail("kinematics", s.slot, id_str(r.id) + " reappears after its exit");
    }
    if (!world_.path_index(r.path)) {
      fail("kinematics", s.slot, id_str(r.id) + " on unknown path " + r.path);
    }
    if (!(r.v >= -kReplayTolerance && r.v <= header_.kin.v_max + kReplayTolerance)) {
      fail("kinematics", s.slot, id_str(r.id) + " speed out of bounds");
    }
    if (r.u && !(header_.kin.u_min <= *r.u && *r.u <= header_.kin.u_max)) {
      fail("kinematics", s.slot, id_str(r.id) + " control out of bounds");
    }
    if (r.status == RobotStatus::kExited) {
      if (r.u) fail("kinematics", s.slot, id_str(r.id) + " exited with control");
      if (exiting.count(r.id) == 0) {
        fail("kinematics", s.slot, id_str(r.id) + " exited without event");
      }
    } else if (!r.u) {
      fail("kinematics", s.slot, id_str(r.id) + " has no control");
    }
  }
  if (prev_) {
    std::map<RobotId, const RobotRecord*> before;
    for (const RobotRecord& r : prev_->robots) before[r.id] = &r;
    for (const auto& [id, r] : before) {
      const auto it = now.find(id);
      if (r->status == RobotStatus::kExited) {
        if (it != now.end()) {
          fail("kinematics", s.slot, id_str(id) + " present after its exit");
        }
        continue;
      }
      if (it == now.end()) {
        fail("kinematics", s.slot, id_str(id) + " vanished");
        continue;
      }
      if (it->second->path != r->path) {
        fail("kinematics", s.slot, id_str(id) + " changed path");
      }
      const RobotState next = step({r->x, r->v}, *r->u, header_.kin);
      if (std::abs(next.x - it->second->x) > kReplayTolerance ||
          std::abs(next.v - it->second->v) > kReplayTolerance) {
        std::ostringstream d;
        d.precision(17);
        d << id_str(id) << " at (" << it->second->x << ", " << it->second->v
          << "), expected (" << next.x << ", " << next.v << ")";
        fail("kinematics", s.slot, d.str());
      }
    }
    for (const auto& [id, r] : now) {
      if (before.count(id) == 0 && spawned.count(id) == 0) {
        fail("kinematics", s.slot, id_str(id) + " appeared without spawn");
      }
    }
  }
}

void TraceMonitor::check_geometry(const SlotRecord& s) {
  const int n = header_.n_sub;
  const double d = footprint_;
  const double min_sq = (d - kCollisionTolerance) * (d - kCollisionTolerance);
  // Positions at n + 1 sub-sampled times of the slot.
  struct Live {
    RobotId id;
    std::size_t path;
    std::vector<double> x;
  };
  std::vector<Live> live;
  std::map<RobotId, std::size_t> index;
  for (const RobotRecord& r : s.robots) {
    if (!is_live(r) || !r.u) continue;
    const auto path = world_.path_index(r.path);
    if (!path) continue;
    Live l{r.id, *path, {}};
    l.x.reserve(static_cast<std::size_t>(n) + 1);
    l.x.push_back(r.x);
    for (int m = 1; m <= n; ++m) {
      l.x.push_back(step({r.x, r.v}, *r.u, header_.kin,
                         static_cast<double>(m) / n)
                        .x);
    }
    index[r.id] = live.size();
    live.push_back(std::move(l));
  }

  // Section distance is the Euclidean distance of the two centers, so only
  // robots in neighbouring grid cells of side D + 2 * (max travel) can touch.
  MonitorResult& col = result("collision");
  double max_travel = 0.0;
  for (const Live& l : live) {
    max_travel = std::max(max_travel, std::abs(l.x.back() - l.x.front()));
  }
  const double cell = d + 2.0 * max_travel + kCollisionTolerance;
  std::map<std::pair<long, long>, std::vector<std::size_t>> grid;
  std::vector<std::pair<long, long>> cell_of(live.size());
  for (std::size_t a = 0; a < live.size(); ++a) {
    const Vec2 p = point_at(world_.path(live[a].path), live[a].x[0]);
    cell_of[a] = {static_cast<long>(std::floor(p.x / cell)),
                  static_cast<long>(std::floor(p.y / cell))};
    grid[cell_of[a]].push_back(a);
  }
  for (std::size_t a = 0; a < live.size(); ++a) {
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        const auto it =
            grid.find({cell_of[a].first + dx, cell_of[a].second + dy});
        if (it == grid.end()) continue;
        for (std::size_t b : it->second) {
          if (b <= a) continue;
          const PairSection& sec = world_.section(live[a].path, live[b].path);
          if (sec.empty()) continue;
          const double travel = (live[a].x.back() - live[a].x.front()) +
                                (live[b].x.back() - live[b].x.front());
          const double d0 =
              std::sqrt(sec.squared_distance(live[a].x[0], live[b].x[0]));
          ++col.checks;
          if (d0 - travel >= d) continue;
          for (int m = 0; m <= n; ++m) {
            if (sec.squared_distance(live[a].x[m], live[b].x[m]) < min_sq) {
              std::ostringstream msg;
              msg << id_str(live[a].id) << " and " << id_str(live[b].id)
                  << " closer than D at t = " << s.slot << " + " << m << "/"
                  << n;
              fail("collision", s.slot, msg.str());
              break;
            }
          }
        }
      }
    }
  }

  MonitorResult& pri = result("priority");
  for (const auto& [w, l] : s.edges) {
    const auto iw = index.find(w);
    const auto il = index.find(l);
    if (iw == index.end() || il == index.end()) continue;
    const Live& lw = live[iw->second];
    const Live& ll = live[il->second];
    const PairSection& sec = world_.section(lw.path, ll.path);
    ++pri.checks;
    for (int m = 0; m <= n; ++m) {
      if (in_shifted_obstacle(sec, Axis::kFirst, lw.x[m], ll.x[m])) {
        std::ostringstream msg;
        msg << "edge (" << to_string(w) << ", " << to_string(l)
            << ") violated at t = " << s.slot << " + " << m << "/" << n;
        fail("priority", s.slot, msg.str());
        break;
      }
    }
  }
}

void TraceMonitor::check_accepted(const SlotRecord& s) {
  JointState accepted;
  std::set<RobotId> vertices;
  for (const RobotRecord& r : s.robots) {
    const auto path = world_.path_index(r.path);
    if (!path) continue;
    if (r.status == RobotStatus::kAccepted) {
      accepted[r.id] = {r.x, r.v};
      vertices.insert(r.id);
    } else if (r.status != RobotStatus::kExited) {
      MonitorResult& e = result("entry");
      ++e.checks;
      if (r.x > world_.path(*path).x_entry() + kReplayTolerance) {
        fail("entry", s.slot,
             id_str(r.id) + " passed x_entry without being accepted");
      }
    }
  }

  MonitorResult& gm = result("graph");
  ++gm.checks;
  PriorityGraph g;
  try {
    g = PriorityGraph::from_edges(vertices, s.edges);
  } catch (const ContractViolation& e) {
    fail("graph", s.slot, e.what());
    return;
  }
  if (!g.is_acyclic()) fail("graph", s.slot, "priority graph has a cycle");
  if (!is_complete(g, world_)) {
    fail("graph", s.slot, "priority graph is not complete");
  }

  SafetyOptions opt;
  opt.n_sub = header_.n_sub;
  MonitorResult& bs = result("brake_safety");
  ++bs.checks;
  if (auto c = brake_safety_violation(accepted, g, world_, opt)) {
    std::ostringstream msg;
    msg << "edge (" << to_string(c->winner) << ", " << to_string(c->loser)
        << ") not brake safe, contact at +" << c->time;
    fail("brake_safety", s.slot, msg.str());
  }

  MonitorResult& cb = result("control_bound");
  for (const RobotRecord& r : s.robots) {
    if (r.status != RobotStatus::kAccepted || !r.u) continue;
    ++cb.checks;
    if (*r.u <= header_.kin.u_min) continue;  // never above the law
    const double law = control_law_for(r.id, accepted, g, world_, opt);
    if (*r.u > law) {
      std::ostringstream msg;
      msg << id_str(r.id) << " applied " << *r.u << " above the law " << law;
      fail("control_bound", s.slot, msg.str());
    }
  }
}

void TraceMonitor::on_slot(const SlotRecord& s) {
  if (!have_header_) throw TraceError("slot before header");
  // Register newcomers; robots that exited in the previous slot are gone.
  if (prev_) {
    for (const RobotRecord& r : prev_->robots) {
      if (r.status == RobotStatus::kExited && world_.has_robot(r.id)) {
        world_.remove_robot(r.id);
        exited_.insert(r.id);
      }
    }
  }
  for (const RobotRecord& r : s.robots) {
    if (world_.has_robot(r.id)) continue;
    if (const auto path = world_.path_index(r.path)) {
      world_.add_robot(r.id, *path, header_.kin);
    }
  }

  check_kinematics(s);
  check_geometry(s);
  check_accepted(s);

  std::size_t live = 0;
  for (const RobotRecord& r : s.robots) live += is_live(r) ? 1 : 0;
  if (header_.drain_after && s.slot == *header_.drain_after) {
    deadline_ = *header_.drain_after +
                kDrainCrossingsPerRobot * crossing_slots_ *
                    static_cast<int>(live);
  }
  if (deadline_) {
    MonitorResult& lv = result("liveness");
    ++lv.checks;
    if (s.slot > *deadline_ && live > 0) {
      fail("liveness", s.slot,
           std::to_string(live) + " robots left after the drain deadline " +
               std::to_string(*deadline_));
    }
  }
  last_slot_ = s.slot;
  last_live_ = live;
  prev_ = s;
}

void TraceMonitor::on_footer(const TraceFooter& f) {
  if (f.status == "liveness") {
    fail("liveness", last_slot_ + 1, "controller: " + f.diagnostic);
  }
  if (f.slots != last_slot_ + 1) {
    fail("kinematics", last_slot_ + 1, "footer slot count mismatch");
  }
  if (header_.drain_after && f.status == "ok" && last_live_ > 0) {
    fail("liveness", last_slot_,
         std::to_string(last_live_) + " robots still present at the end");
  }
}

VerifyReport verify_trace(std::istream& trace, std::vector<PathSpec> paths,
                          double footprint) {
  TraceMonitor monitor(std::move(paths), footprint);
  read_trace(trace, monitor);
  return monitor.report();
}

}  // namespace pcoord
