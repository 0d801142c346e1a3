#include "pcoord/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace pcoord {

namespace {
constexpr double kUnitTolerance = 1e-12;
constexpr double kParallelTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

PathSpec::PathSpec(std::string id, Vec2 origin, Vec2 direction, double length,
                   double x_entry, double x_exit)
    : id_(std::move(id)),
      origin_(origin),
      direction_(direction),
      length_(length),
      x_entry_(x_entry),
      x_exit_(x_exit) {
  if (std::abs(norm(direction) - 1.0) > kUnitTolerance) {
    throw GeometryError("path " + id_ + ": direction is not a unit vector");
  }
  if (!(length >= 0.0)) {
    throw GeometryError("path " + id_ + ": negative length");
  }
  if (!(0.0 <= x_entry && x_entry < x_exit && x_exit <= length)) {
    throw GeometryError("path " + id_ +
                        ": need 0 <= x_entry < x_exit <= length");
  }
}

Footprint::Footprint(double diameter) : diameter_(diameter) {
  if (!(diameter > 0.0)) {
    throw GeometryError("footprint diameter must be positive");
  }
}

PairSection PairSection::crossing(double c_first, double c_second,
                                  double cos_angle, double diameter) {
  if (!(std::abs(cos_angle) < 1.0)) {
    throw GeometryError("crossing section needs non-parallel paths");
  }
  return PairSection(SectionKind::kCrossing, c_first, c_second, cos_angle,
                     diameter);
}

PairSection PairSection::same_path(double diameter) {
  return PairSection(SectionKind::kSamePath, 0.0, 0.0, 1.0, diameter);
}

PairSection PairSection::disjoint() {
  return PairSection(SectionKind::kDisjoint, 0.0, 0.0, 0.0, 0.0);
}

double PairSection::squared_distance(double x_first, double x_second) const {
  switch (kind_) {
    case SectionKind::kCrossing: {
      const double a = x_first - c_first_;
      const double b = x_second - c_second_;
      return a * a + b * b - 2.0 * cos_angle_ * a * b;
    }
    case SectionKind::kSamePath: {
      const double gap = x_first - x_second;
      return gap * gap;
    }
    case SectionKind::kDisjoint:
      break;
  }
  return kInf;
}

Interval PairSection::extent(Axis axis, double margin) const {
  switch (kind_) {
    case SectionKind::kCrossing: {
      // max |a| over the ellipse is D / sqrt(1 - k^2).
      const double r =
          (diameter_ + margin) / std::sqrt(1.0 - cos_angle_ * cos_angle_);
      const double c = center(axis);
      return {c - r, c + r};
    }
    case SectionKind::kSamePath:
      return {-kInf, kInf};
    case SectionKind::kDisjoint:
      break;
  }
  return {kInf, -kInf};
}

PairSection PairSection::swapped() const {
  return PairSection(kind_, c_second_, c_first_, cos_angle_, diameter_);
}

Vec2 point_at(const PathSpec& path, double x) {
  return path.origin() + x * path.direction();
}

PairSection pair_section(const PathSpec& first, const PathSpec& second,
                         const Footprint& footprint) {
  const double d = footprint.diameter();
  if (first.id() == second.id()) return PairSection::same_path(d);

  const Vec2 da = first.direction();
  const Vec2 db = second.direction();
  const Vec2 w = second.origin() - first.origin();
  const double denom = cross(da, db);
  if (std::abs(denom) < kParallelTolerance) {
    const double line_distance = std::abs(cross(w, da));
    if (line_distance >= d) return PairSection::disjoint();
    throw GeometryError("paths " + first.id() + " and " + second.id() +
                        " are parallel and closer than the footprint");
  }
  // Solve origin_a + c_a da = origin_b + c_b db.
  const double c_first = cross(w, db) / denom;
  const double c_second = cross(w, da) / denom;
  return PairSection::crossing(c_first, c_second, dot(da, db), d);
}

bool in_obstacle(const PairSection& section, double x_first, double x_second,
                 double margin) {
  if (section.empty()) return false;
  const double threshold = section.diameter() + margin;
  return section.squared_distance(x_first, x_second) < threshold * threshold;
}

double shifted_min_squared_distance(const PairSection& section, Axis winner,
                                    double x_winner, double x_loser) {
  const double k = section.cos_angle();
  // Quadrant in centered coordinates: a >= alpha (winner), b <= beta (loser).
  const double alpha = x_winner - section.center(winner);
  const double beta = x_loser - section.center(other(winner));
  if (alpha <= 0.0 && beta >= 0.0) return 0.0;

  auto q = [k](double a, double b) { return a * a + b * b - 2.0 * k * a * b; };
  // The minimum of a convex quadratic over the quadrant lies on one of its
  // two boundary rays; on each ray the 1-D minimizer is clamped to the ray.
  const double b_star = std::min(k * alpha, beta);
  const double a_star = std::max(k * beta, alpha);
  return std::min(q(alpha, b_star), q(a_star, beta));
}

bool in_shifted_obstacle(const PairSection& section, Axis winner,
                         double x_winner, double x_loser, double margin) {
  const double threshold = section.diameter() + margin;
  switch (section.kind()) {
    case SectionKind::kCrossing:
      return shifted_min_squared_distance(section, winner, x_winner, x_loser) <
             threshold * threshold;
    case SectionKind::kSamePath:
      // Some a, b >= 0 bring the gap below D unless the loser trails the
      // winner by at least D.
      return x_loser - x_winner > -threshold;
    case SectionKind::kDisjoint:
      break;
  }
  return false;
}

}  // namespace pcoord
