#include "pcoord/monitor.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "pcoord/config.hpp"
#include "pcoord/simulator.hpp"

namespace pcoord {
namespace {

// Two perpendicular lanes crossing at (0.6, -0.6): east0 passes the crossing
// at x = 17.4, north0 at x = 16.2.
constexpr double kEastCross = 17.4;
constexpr double kNorthCross = 16.2;

class MonitorTest : public ::testing::Test {
 protected:
  MonitorTest() : config_(resolve_config("single")) {
    config_.initial_robots.clear();
    paths_ = build_paths(config_);
  }

  TraceHeader Header() const {
    TraceHeader h;
    h.footprint = config_.footprint_diameter;
    h.kin = config_.kin;
    for (const PathSpec& p : paths_) {
      h.paths.push_back({p.id(), p.x_entry(), p.x_exit()});
    }
    return h;
  }

  static RobotRecord Accepted(std::uint32_t id, const char* path, double x,
                              double v, double u) {
    return {RobotId{id}, path, x, v, u, Regime::kControlled,
            RobotStatus::kAccepted};
  }

  VerifyReport Replay(const TraceHeader& h, const std::vector<SlotRecord>& s,
                      TraceFooter f) {
    TraceMonitor m(paths_, config_.footprint_diameter);
    m.on_header(h);
    for (const SlotRecord& r : s) m.on_slot(r);
    f.slots = static_cast<int>(s.size());
    m.on_footer(f);
    return m.report();
  }

  VerifyReport Replay(const Trace& t) {
    return Replay(t.header, t.slots, t.footer);
  }

  ScenarioConfig config_;
  std::vector<PathSpec> paths_;
};

TEST_F(MonitorTest, CrossingPointsMatchLayout) {
  const PairSection& sec =
      WorldModel(paths_, Footprint(1.0)).section(0, 1);
  EXPECT_NEAR(sec.squared_distance(kEastCross, kNorthCross), 0.0, 1e-12);
}

TEST_F(MonitorTest, SimulatedRunPassesOffline) {
  ScenarioConfig c = resolve_config("cross8_individual_brake");
  c.horizon = 400;
  TraceCollector col;
  const RunResult r = run(c, &col);
  ASSERT_EQ(r.status, RunStatus::kOk) << r.diagnostic;
  TraceMonitor m(build_paths(c), c.footprint_diameter);
  const Trace& t = col.trace();
  m.on_header(t.header);
  for (const SlotRecord& s : t.slots) m.on_slot(s);
  m.on_footer(t.footer);
  const VerifyReport& rep = m.report();
  EXPECT_TRUE(rep.passed()) << rep.to_text();
  for (const MonitorResult& mr : rep.monitors) {
    if (mr.name == "liveness") continue;  // only counts in drain mode
    EXPECT_GT(mr.checks, 0) << mr.name;
  }
}

TEST_F(MonitorTest, TeleportIntoShiftedObstacleFailsPriority) {
  const double u = config_.kin.u_max;
  SlotRecord s0;
  s0.slot = 0;
  s0.edges = {{RobotId{1}, RobotId{2}}};
  s0.robots = {Accepted(1, "east0", kEastCross, 0.0, u),
               Accepted(2, "north0", 0.0, 0.0, config_.kin.u_min)};
  SlotRecord s1 = s0;
  s1.slot = 1;
  // Winner moved by u / 2 from rest; loser jumped onto the crossing.
  s1.robots = {Accepted(1, "east0", kEastCross + u / 2, u, u),
               Accepted(2, "north0", kNorthCross, 0.0, config_.kin.u_min)};
  const VerifyReport rep = Replay(Header(), {s0, s1}, {});
  const MonitorResult& pri = rep.get("priority");
  EXPECT_FALSE(pri.passed);
  ASSERT_TRUE(pri.slot.has_value());
  EXPECT_EQ(*pri.slot, 1);
  EXPECT_FALSE(rep.get("collision").passed);
  EXPECT_EQ(*rep.get("kinematics").slot, 1);
}

TEST_F(MonitorTest, ControlAboveLawFailsControlBound) {
  // Loser at full speed: one throttle slot then braking ends at 15.5, past
  // the section start 15.2 while the winner sits on the crossing. Braking
  // now stops it at 15.0, so the state itself is brake safe.
  SlotRecord s0;
  s0.edges = {{RobotId{1}, RobotId{2}}};
  s0.robots = {Accepted(1, "east0", kEastCross, 0.0, 0.0),
               Accepted(2, "north0", 10.0, 0.5, config_.kin.u_max)};
  VerifyReport rep = Replay(Header(), {s0}, {});
  EXPECT_FALSE(rep.get("control_bound").passed);
  EXPECT_EQ(*rep.get("control_bound").slot, 0);
  EXPECT_TRUE(rep.get("brake_safety").passed);
  EXPECT_TRUE(rep.get("kinematics").passed);

  s0.robots[1].u = config_.kin.u_min;
  rep = Replay(Header(), {s0}, {});
  EXPECT_TRUE(rep.passed()) << rep.to_text();
}

TEST_F(MonitorTest, TamperedPositionFailsKinematics) {
  ScenarioConfig c = resolve_config("single");
  TraceCollector col;
  ASSERT_EQ(run(c, &col).status, RunStatus::kOk);
  Trace t = col.release();
  ASSERT_GT(t.slots.size(), 60u);
  ASSERT_FALSE(t.slots[50].robots.empty());
  EXPECT_TRUE(Replay(t).passed());
  t.slots[50].robots[0].x += 1e-6;
  const VerifyReport rep = Replay(t);
  EXPECT_FALSE(rep.get("kinematics").passed);
  EXPECT_EQ(*rep.get("kinematics").slot, 50);
}

TEST_F(MonitorTest, UnacceptedRobotPastEntryFailsEntry) {
  SlotRecord s0;
  s0.robots = {{RobotId{1}, "east0", paths_[0].x_entry() + 0.01, 0.5,
                config_.kin.u_min, Regime::kControlled,
                RobotStatus::kRequested}};
  const VerifyReport rep = Replay(Header(), {s0}, {});
  EXPECT_FALSE(rep.get("entry").passed);
}

TEST_F(MonitorTest, MissingEdgeFailsGraph) {
  SlotRecord s0;
  s0.robots = {Accepted(1, "east0", 0.0, 0.0, 0.0),
               Accepted(2, "north0", 0.0, 0.0, 0.0)};
  const VerifyReport rep = Replay(Header(), {s0}, {});
  EXPECT_FALSE(rep.get("graph").passed);
}

TEST_F(MonitorTest, ControllerLivenessFailureIsReported) {
  SlotRecord s0;
  const VerifyReport rep =
      Replay(Header(), {s0}, {0, "liveness", "prediction did not clear"});
  EXPECT_FALSE(rep.get("liveness").passed);
}

TEST_F(MonitorTest, DrainDeadline) {
  // From rest, 20 slots to reach 0.5 covering 5, then 0.5 per slot: past
  // x_exit = 24.4 of east0 after 20 + 39 slots.
  TraceHeader h = Header();
  ASSERT_NEAR(paths_[0].x_exit(), 24.4, 1e-9);
  h.drain_after = 0;
  SlotRecord s0;
  s0.robots = {Accepted(1, "east0", 0.0, 0.0, 0.0)};
  TraceMonitor m(paths_, 1.0);
  m.on_header(h);
  m.on_slot(s0);
  ASSERT_TRUE(m.drain_deadline().has_value());
  EXPECT_EQ(*m.drain_deadline(), kDrainCrossingsPerRobot * 59);
  // Still present at the end of a drain run.
  m.on_footer({1, "ok", ""});
  EXPECT_FALSE(m.report().get("liveness").passed);
}

TEST_F(MonitorTest, MismatchedConfigIsTraceError) {
  TraceHeader h = Header();
  h.paths[0].x_entry += 1.0;
  TraceMonitor m(paths_, 1.0);
  EXPECT_THROW(m.on_header(h), TraceError);
  TraceMonitor m2(paths_, 1.0);
  h = Header();
  h.footprint = 2.0;
  EXPECT_THROW(m2.on_header(h), TraceError);
}

}  // namespace
}  // namespace pcoord
