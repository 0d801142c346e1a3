#include "pcoord/priority.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_worlds.hpp"

namespace pcoord {
namespace {

using testing::CrossWorld;
using testing::GridWorld;
using testing::Id;

// Kahn-free cycle check: a graph is acyclic iff some ordering of the
// vertices puts every winner before its loser. Tries all permutations.
bool HasTopologicalOrder(const PriorityGraph& g) {
  std::vector<RobotId> order(g.vertices().begin(), g.vertices().end());
  do {
    bool ok = true;
    for (const auto& [w, l] : g.edges()) {
      const auto pw = std::find(order.begin(), order.end(), w);
      const auto pl = std::find(order.begin(), order.end(), l);
      if (pw > pl) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

TEST(PriorityGraphTest, AddLowestPriority) {
  WorldModel world = CrossWorld();
  world.add_robot(Id(1), 0, {});
  world.add_robot(Id(2), 1, {});
  PriorityGraph g = add_lowest_priority({}, Id(1), world);
  EXPECT_EQ(g.vertices().size(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
  g = add_lowest_priority(g, Id(2), world);
  EXPECT_TRUE(g.has_edge(Id(1), Id(2)));
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_THROW(add_lowest_priority(g, Id(2), world), ContractViolation);
  EXPECT_TRUE(is_complete(g, world));
}

TEST(PriorityGraphTest, ChainPlusNewcomerStaysAcyclic) {
  WorldModel world = CrossWorld();
  world.add_robot(Id(1), 0, {});
  world.add_robot(Id(2), 1, {});
  world.add_robot(Id(3), 0, {});
  world.add_robot(Id(4), 1, {});
  const PriorityGraph chain = PriorityGraph::from_edges(
      {Id(1), Id(2), Id(3)}, {{Id(1), Id(2)}, {Id(2), Id(3)}, {Id(1), Id(3)}});
  const PriorityGraph g = add_lowest_priority(chain, Id(4), world);
  EXPECT_TRUE(g.has_edge(Id(1), Id(4)));
  EXPECT_TRUE(g.has_edge(Id(2), Id(4)));
  EXPECT_TRUE(g.has_edge(Id(3), Id(4)));
  EXPECT_TRUE(g.is_acyclic());
  EXPECT_TRUE(HasTopologicalOrder(g));
}

TEST(PriorityGraphTest, RemoveVertex) {
  const PriorityGraph chain = PriorityGraph::from_edges(
      {Id(1), Id(2), Id(3)}, {{Id(1), Id(2)}, {Id(2), Id(3)}});
  const PriorityGraph no_sink = remove_vertex(chain, Id(3));
  EXPECT_EQ(no_sink.edges(), (std::vector<PriorityGraph::Edge>{{Id(1), Id(2)}}));
  const PriorityGraph no_source = remove_vertex(chain, Id(1));
  EXPECT_EQ(no_source.edges(),
            (std::vector<PriorityGraph::Edge>{{Id(2), Id(3)}}));
  const PriorityGraph no_middle = remove_vertex(chain, Id(2));
  EXPECT_EQ(no_middle.edge_count(), 0u);
  EXPECT_FALSE(no_middle.has_edge(Id(1), Id(3)));
  EXPECT_THROW(remove_vertex(chain, Id(9)), ContractViolation);
}

TEST(PriorityGraphTest, FromEdgesValidation) {
  EXPECT_THROW(PriorityGraph::from_edges({Id(1)}, {{Id(1), Id(1)}}),
               ContractViolation);
  EXPECT_THROW(PriorityGraph::from_edges({Id(1)}, {{Id(1), Id(2)}}),
               ContractViolation);
  EXPECT_THROW(PriorityGraph::from_edges({Id(1), Id(2)},
                                         {{Id(1), Id(2)}, {Id(2), Id(1)}}),
               ContractViolation);
  const PriorityGraph cycle = PriorityGraph::from_edges(
      {Id(1), Id(2), Id(3)}, {{Id(1), Id(2)}, {Id(2), Id(3)}, {Id(3), Id(1)}});
  EXPECT_FALSE(cycle.is_acyclic());
}

TEST(PriorityGraphTest, AcyclicityMatchesPermutationSearch) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    std::set<RobotId> v;
    for (int i = 0; i < n; ++i) v.insert(Id(i));
    std::vector<PriorityGraph::Edge> e;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        switch (rng() % 3) {
          case 0: e.emplace_back(Id(i), Id(j)); break;
          case 1: e.emplace_back(Id(j), Id(i)); break;
          default: break;
        }
      }
    }
    const PriorityGraph g = PriorityGraph::from_edges(v, e);
    EXPECT_EQ(g.is_acyclic(), HasTopologicalOrder(g));
  }
}

TEST(ConfigFreeTest, Examples) {
  WorldModel world = CrossWorld();
  world.add_robot(Id(1), 0, {});
  world.add_robot(Id(2), 1, {});
  const auto ij = PriorityGraph::from_edges({Id(1), Id(2)}, {{Id(1), Id(2)}});
  const auto ji = PriorityGraph::from_edges({Id(1), Id(2)}, {{Id(2), Id(1)}});
  EXPECT_TRUE(config_free({{Id(1), 4.0}, {Id(2), 4.0}}, ij, world));
  EXPECT_TRUE(config_free({{Id(1), 4.0}, {Id(2), 4.0}}, ji, world));
  EXPECT_FALSE(config_free({{Id(1), 8.0}, {Id(2), 10.0}}, ij, world));
  EXPECT_TRUE(config_free({{Id(1), 8.0}, {Id(2), 10.0}},
                          PriorityGraph::from_edges({Id(1), Id(2)}, {}),
                          world));
}

TEST(BrakeSafetyTest, RestingFreeConfigurationIsSafe) {
  WorldModel world = CrossWorld();
  world.add_robot(Id(1), 0, {});
  world.add_robot(Id(2), 1, {});
  const auto g = PriorityGraph::from_edges({Id(1), Id(2)}, {{Id(1), Id(2)}});
  EXPECT_TRUE(is_brake_safe({{Id(1), {4, 0}}, {Id(2), {4, 0}}}, g, world));
  EXPECT_TRUE(is_brake_safe({{Id(1), {12, 0}}, {Id(2), {12, 0}}}, g, world));
  EXPECT_FALSE(is_brake_safe({{Id(1), {8, 0}}, {Id(2), {12, 0}}}, g, world));
}

TEST(BrakeSafetyTest, BrakingDistanceBoundary) {
  WorldModel world = CrossWorld();
  world.add_robot(Id(1), 0, {});
  world.add_robot(Id(2), 1, {});
  const auto g = PriorityGraph::from_edges({Id(1), Id(2)}, {{Id(1), Id(2)}});
  // Winner parked on the crossing: the loser must stop before 9.
  for (double eps : {1e-6, 1e-3, 0.5}) {
    EXPECT_TRUE(is_brake_safe({{Id(1), {10, 0}}, {Id(2), {4 - eps, 0.5}}}, g,
                              world));
    EXPECT_FALSE(is_brake_safe({{Id(1), {10, 0}}, {Id(2), {4 + eps, 0.5}}}, g,
                               world));
  }
}

TEST(BrakeSafetyTest, SingleRobotAlwaysSafe) {
  WorldModel world = CrossWorld();
  world.add_robot(Id(1), 0, {});
  const auto g = PriorityGraph::from_edges({Id(1)}, {});
  EXPECT_TRUE(is_brake_safe({{Id(1), {10, 0.5}}}, g, world));
}

TEST(BrakeSafetyTest, MissingStateIsAContractViolation) {
  WorldModel world = CrossWorld();
  world.add_robot(Id(1), 0, {});
  world.add_robot(Id(2), 1, {});
  const auto g = PriorityGraph::from_edges({Id(1), Id(2)}, {{Id(1), Id(2)}});
  EXPECT_THROW(is_brake_safe({{Id(1), {10, 0}}}, g, world), ContractViolation);
}

// Densely sampled all-brake flow, compared to the shifted sets with no
// margin. Any state the predicate accepts must pass this.
bool DenseBrakeCheck(const JointState& s, const PriorityGraph& g,
                     const WorldModel& world) {
  for (const auto& [w, l] : g.edges()) {
    const Kinodynamics& kw = world.robot(w).kin;
    const Kinodynamics& kl = world.robot(l).kin;
    const Trajectory tw(s.at(w), ControlSequence::constant(kw.u_min, kw), kw);
    const Trajectory tl(s.at(l), ControlSequence::constant(kl.u_min, kl), kl);
    for (double t = 0; t <= 22.0; t += 1.0 / 256) {
      if (in_shifted_obstacle(world.section_between(w, l), Axis::kFirst,
                              tw.x_at(t), tl.x_at(t))) {
        return false;
      }
    }
  }
  return true;
}

class RandomGridStates : public ::testing::Test {
 protected:
  void SetUp() override {
    for (std::uint32_t i = 0; i < 6; ++i) world_.add_robot(Id(i), i % 4, {});
  }
  JointState Draw() {
    std::uniform_real_distribution<double> x(0, 30), v(0, 0.5);
    JointState s;
    for (std::uint32_t i = 0; i < 6; ++i) s[Id(i)] = {x(rng_), v(rng_)};
    return s;
  }
  // Priority by ascending position order along a random permutation.
  PriorityGraph RandomOrder() {
    std::vector<RobotId> order;
    for (std::uint32_t i = 0; i < 6; ++i) order.push_back(Id(i));
    std::shuffle(order.begin(), order.end(), rng_);
    PriorityGraph g;
    for (RobotId id : order) g = add_lowest_priority(g, id, world_);
    return g;
  }
  WorldModel world_ = GridWorld();
  std::mt19937_64 rng_{77};
};

TEST_F(RandomGridStates, SafeStatesPassDenseCheck) {
  int safe = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const JointState s = Draw();
    const PriorityGraph g = RandomOrder();
    if (!is_brake_safe(s, g, world_)) continue;
    ++safe;
    EXPECT_TRUE(DenseBrakeCheck(s, g, world_));
    Configuration cfg;
    for (const auto& [id, st] : s) cfg[id] = st.x;
    EXPECT_TRUE(config_free(cfg, g, world_));
    for (const auto& [w, l] : g.edges()) {
      EXPECT_FALSE(in_obstacle(world_.section_between(w, l), s.at(w).x,
                               s.at(l).x));
    }
  }
  EXPECT_GT(safe, 20);
}

TEST_F(RandomGridStates, SafetyMonotoneInPositions) {
  std::uniform_real_distribution<double> push(0, 3);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    JointState s = Draw();
    const PriorityGraph g = RandomOrder();
    if (!is_brake_safe(s, g, world_) || g.edge_count() == 0) continue;
    const auto edges = g.edges();
    const auto [w, l] = edges[rng_() % edges.size()];
    // Only move robots that are pure winners or pure losers.
    if (g.winners_of(w).empty()) {
      s[w].x += push(rng_);
    }
    if (g.losers_of(l).empty()) {
      s[l].x -= push(rng_);
    }
    ++checked;
    EXPECT_TRUE(is_brake_safe(s, g, world_));
  }
  EXPECT_GT(checked, 20);
}

}  // namespace
}  // namespace pcoord
