#include "pcoord/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace pcoord {
namespace {

PathSpec Horizontal(double y = 0.0) {
  return PathSpec("h", {0.0, y}, {1.0, 0.0}, 20.0, 4.0, 16.0);
}
PathSpec Vertical(double x = 10.0) {
  return PathSpec("v", {x, -10.0}, {0.0, 1.0}, 20.0, 4.0, 16.0);
}

// Brute force minimum of ||p_w(x_w + a) - p_l(x_l - b)||^2 over a grid of
// translations a, b in [0, span], refined around the best cell.
double ScanShiftedMin(const PairSection& sec, Axis winner, double xw,
                      double xl, double span) {
  auto q = [&](double a, double b) {
    const double w = xw + a;
    const double l = xl - b;
    return winner == Axis::kFirst ? sec.squared_distance(w, l)
                                  : sec.squared_distance(l, w);
  };
  double best = q(0.0, 0.0);
  double best_a = 0.0;
  double best_b = 0.0;
  double lo_a = 0.0, hi_a = span, lo_b = 0.0, hi_b = span;
  for (int round = 0; round < 6; ++round) {
    constexpr int kCells = 60;
    const double da = (hi_a - lo_a) / kCells;
    const double db = (hi_b - lo_b) / kCells;
    for (int i = 0; i <= kCells; ++i) {
      for (int j = 0; j <= kCells; ++j) {
        const double a = lo_a + i * da;
        const double b = lo_b + j * db;
        const double v = q(a, b);
        if (v < best) {
          best = v;
          best_a = a;
          best_b = b;
        }
      }
    }
    lo_a = std::max(0.0, best_a - 2 * da);
    hi_a = best_a + 2 * da;
    lo_b = std::max(0.0, best_b - 2 * db);
    hi_b = best_b + 2 * db;
  }
  return best;
}

TEST(PathSpecTest, RejectsBadInput) {
  EXPECT_THROW(PathSpec("p", {0, 0}, {1.0, 0.1}, 10, 1, 2), GeometryError);
  EXPECT_THROW(PathSpec("p", {0, 0}, {1, 0}, 10, 3, 2), GeometryError);
  EXPECT_THROW(PathSpec("p", {0, 0}, {1, 0}, 10, 1, 11), GeometryError);
  EXPECT_THROW(Footprint(0.0), GeometryError);
  EXPECT_NO_THROW(PathSpec("p", {0, 0}, {0.6, 0.8}, 10, 0, 10));
}

TEST(PointAtTest, Examples) {
  const PathSpec h("h", {0, 0}, {1, 0}, 10, 0, 10);
  EXPECT_DOUBLE_EQ(point_at(h, 3).x, 3);
  EXPECT_DOUBLE_EQ(point_at(h, 3).y, 0);
  EXPECT_DOUBLE_EQ(point_at(h, 0).x, 0);
  const PathSpec v("v", {1, 1}, {0, 1}, 10, 0, 10);
  EXPECT_DOUBLE_EQ(point_at(v, 2.5).x, 1);
  EXPECT_DOUBLE_EQ(point_at(v, 2.5).y, 3.5);
  // Extrapolates beyond the path.
  EXPECT_DOUBLE_EQ(point_at(h, -2).x, -2);
}

TEST(PairSectionTest, PerpendicularIsUnitDisc) {
  const PairSection sec = pair_section(Horizontal(), Vertical(), Footprint(1));
  ASSERT_EQ(sec.kind(), SectionKind::kCrossing);
  EXPECT_NEAR(sec.center(Axis::kFirst), 10.0, 1e-12);
  EXPECT_NEAR(sec.center(Axis::kSecond), 10.0, 1e-12);
  EXPECT_NEAR(sec.cos_angle(), 0.0, 1e-15);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(8.0, 12.0);
  for (int i = 0; i < 200; ++i) {
    const double a = d(rng), b = d(rng);
    const Vec2 diff = point_at(Horizontal(), a) - point_at(Vertical(), b);
    EXPECT_NEAR(sec.squared_distance(a, b), dot(diff, diff), 1e-9);
    EXPECT_NEAR(sec.squared_distance(a, b),
                (a - 10) * (a - 10) + (b - 10) * (b - 10), 1e-9);
  }
}

TEST(PairSectionTest, SamePathAndParallel) {
  const Footprint f(1);
  EXPECT_EQ(pair_section(Horizontal(), Horizontal(), f).kind(),
            SectionKind::kSamePath);
  const PathSpec far("far", {0, 5}, {1, 0}, 20, 4, 16);
  EXPECT_EQ(pair_section(Horizontal(), far, f).kind(), SectionKind::kDisjoint);
  const PathSpec opposite("opp", {20, 1.0}, {-1, 0}, 20, 4, 16);
  EXPECT_EQ(pair_section(Horizontal(), opposite, f).kind(),
            SectionKind::kDisjoint);
  const PathSpec close("close", {0, 0.5}, {1, 0}, 20, 4, 16);
  EXPECT_THROW(pair_section(Horizontal(), close, f), GeometryError);
}

TEST(PairSectionTest, SwappedAxesDescribeSameSet) {
  const PathSpec a("a", {-3, 1}, {0.6, 0.8}, 20, 1, 19);
  const PathSpec b("b", {5, -4}, {-0.8, 0.6}, 20, 1, 19);
  const Footprint f(1.3);
  const PairSection ab = pair_section(a, b, f);
  const PairSection ba = pair_section(b, a, f);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-5.0, 25.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = d(rng), y = d(rng);
    EXPECT_NEAR(ab.squared_distance(x, y), ba.squared_distance(y, x), 1e-9);
    EXPECT_EQ(in_obstacle(ab, x, y), in_obstacle(ab.swapped(), y, x));
    EXPECT_EQ(in_shifted_obstacle(ab, Axis::kFirst, x, y),
              in_shifted_obstacle(ba, Axis::kSecond, x, y));
  }
}

TEST(InObstacleTest, Examples) {
  const PairSection disc = PairSection::crossing(10, 10, 0, 1);
  EXPECT_TRUE(in_obstacle(disc, 10, 10));
  EXPECT_FALSE(in_obstacle(disc, 10, 11.5));
  EXPECT_FALSE(in_obstacle(disc, 10, 11.0));  // open set
  EXPECT_TRUE(in_obstacle(disc, 10, 11.0, kGeomEpsilon));
  const PairSection same = PairSection::same_path(1);
  EXPECT_TRUE(in_obstacle(same, 4.2, 4.9));
  EXPECT_FALSE(in_obstacle(PairSection::disjoint(), 0, 0));
}

TEST(InShiftedObstacleTest, Examples) {
  const PairSection disc = PairSection::crossing(10, 10, 0, 1);
  EXPECT_TRUE(in_shifted_obstacle(disc, Axis::kFirst, 8, 10));
  EXPECT_FALSE(in_shifted_obstacle(disc, Axis::kFirst, 11.5, 10));
  EXPECT_TRUE(in_shifted_obstacle(disc, Axis::kFirst, 10.2, 9.9));
  // The witness for (8, 10) is (10, 9.5).
  EXPECT_LT(disc.squared_distance(10, 9.5), 1.0);
  EXPECT_NEAR(ScanShiftedMin(disc, Axis::kFirst, 8, 10, 8), 0.0, 1e-12);
}

TEST(InShiftedObstacleTest, SamePathForbidsClosingUp) {
  const PairSection same = PairSection::same_path(1);
  // Winner ahead by more than D: free.
  EXPECT_FALSE(in_shifted_obstacle(same, Axis::kFirst, 5.0, 3.5));
  EXPECT_FALSE(in_shifted_obstacle(same, Axis::kFirst, 5.0, 4.0));
  EXPECT_TRUE(in_shifted_obstacle(same, Axis::kFirst, 5.0, 4.2));
  // Loser ahead of the winner.
  EXPECT_TRUE(in_shifted_obstacle(same, Axis::kFirst, 3.0, 7.0));
  EXPECT_TRUE(in_shifted_obstacle(same, Axis::kFirst, 5.0, 4.0, 1e-9));
}

TEST(InShiftedObstacleTest, ContainsPlainObstacle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0.1, 3.0);
  std::uniform_real_distribution<double> pos(6.0, 14.0);
  for (int s = 0; s < 50; ++s) {
    const PairSection sec = PairSection::crossing(10, 10, std::cos(ang(rng)), 1);
    for (int i = 0; i < 400; ++i) {
      const double x = pos(rng), y = pos(rng);
      if (!in_obstacle(sec, x, y)) continue;
      EXPECT_TRUE(in_shifted_obstacle(sec, Axis::kFirst, x, y));
      EXPECT_TRUE(in_shifted_obstacle(sec, Axis::kSecond, x, y));
    }
  }
}

// Leaving the shifted set is preserved by moving the winner forward and the
// loser back.
TEST(InShiftedObstacleTest, MonotoneInBothCoordinates) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ang(0.05, 3.09);
  std::uniform_real_distribution<double> pos(4.0, 16.0);
  std::uniform_real_distribution<double> step(0.0, 3.0);
  int checked = 0;
  for (int s = 0; s < 100; ++s) {
    const PairSection sec =
        s % 10 == 0 ? PairSection::same_path(1)
                    : PairSection::crossing(10, 9, std::cos(ang(rng)), 1);
    const Axis winner = s % 2 == 0 ? Axis::kFirst : Axis::kSecond;
    for (int i = 0; i < 200; ++i) {
      const double xw = pos(rng), xl = pos(rng);
      if (in_shifted_obstacle(sec, winner, xw, xl)) continue;
      ++checked;
      EXPECT_FALSE(in_shifted_obstacle(sec, winner, xw + step(rng),
                                       xl - step(rng)));
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(InShiftedObstacleTest, MatchesTranslationScan) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ang(0.2, 2.9);
  std::uniform_real_distribution<double> pos(5.0, 15.0);
  for (int s = 0; s < 30; ++s) {
    const PairSection sec = PairSection::crossing(10, 10, std::cos(ang(rng)), 1);
    for (int i = 0; i < 30; ++i) {
      const double xw = pos(rng), xl = pos(rng);
      const double exact =
          shifted_min_squared_distance(sec, Axis::kFirst, xw, xl);
      const double scan = ScanShiftedMin(sec, Axis::kFirst, xw, xl, 30.0);
      EXPECT_LE(exact, scan + 1e-12);
      EXPECT_NEAR(exact, scan, 1e-6) << "xw=" << xw << " xl=" << xl;
    }
  }
}

}  // namespace
}  // namespace pcoord
