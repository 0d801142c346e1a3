#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcoord/priority.hpp"
#include "pcoord/trace.hpp"

namespace pcoord {

// Absolute tolerance on the center distance for the collision monitor.
inline constexpr double kCollisionTolerance = 1e-6;
// Tolerance on replayed kinematics and on the entry marker.
inline constexpr double kReplayTolerance = 1e-9;
// The control area must be empty this many unobstructed crossings per live
// robot after the drain starts.
inline constexpr int kDrainCrossingsPerRobot = 20;

struct MonitorResult {
  std::string name;
  bool passed = true;
  long checks = 0;
  std::optional<int> slot;  // first counterexample
  std::string detail;
};

struct VerifyReport {
  std::vector<MonitorResult> monitors;

  bool passed() const;
  const MonitorResult* first_failure() const;
  const MonitorResult& get(const std::string& name) const;
  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

// Replays a trace slot by slot and checks:
//   collision     center distance >= D - 1e-6 at n_sub + 1 times per slot
//   priority      no recorded edge has its configuration in the shifted set
//   brake_safety  the accepted robots are brake safe at every slot boundary
//   control_bound recorded controls of accepted robots never exceed the law
//   kinematics    recorded states follow the recorded controls exactly; no
//                 robot appears, vanishes or returns without an event
//   graph         the recorded graph is acyclic and complete
//   entry         robots that are not accepted stay at or before x_entry
//   liveness      in drain mode, every robot is gone by the drain deadline,
//                 and the controller never gave up on a prediction
// The same object serves online (fed by the simulator) and offline.
class TraceMonitor : public TraceSink {
 public:
  TraceMonitor(std::vector<PathSpec> paths, double footprint);

  void on_header(const TraceHeader& h) override;
  void on_slot(const SlotRecord& s) override;
  void on_footer(const TraceFooter& f) override;

  bool failed() const { return failed_; }
  // "monitor: slot k: detail" of the first violation.
  std::string first_violation() const;
  const VerifyReport& report() const { return report_; }
  std::optional<int> drain_deadline() const { return deadline_; }

 private:
  MonitorResult& result(const std::string& name);
  void fail(const std::string& name, int slot, const std::string& detail);
  void check_kinematics(const SlotRecord& s);
  void check_geometry(const SlotRecord& s);
  void check_accepted(const SlotRecord& s);

  std::vector<PathSpec> paths_;
  double footprint_;
  WorldModel world_;
  TraceHeader header_;
  bool have_header_ = false;
  int crossing_slots_ = 0;
  VerifyReport report_;
  bool failed_ = false;
  std::string first_violation_;

  std::optional<SlotRecord> prev_;
  std::set<RobotId> exited_;
  std::optional<int> deadline_;
  int last_slot_ = -1;
  std::size_t last_live_ = 0;
};

// Offline verification of a JSONL trace against its config.
VerifyReport verify_trace(std::istream& trace, std::vector<PathSpec> paths,
                          double footprint);

}  // namespace pcoord
