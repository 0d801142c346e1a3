#pragma once

#include <stdexcept>
#include <string>

namespace pcoord {

// Conservative inflation applied to obstacle sets whenever a membership test
// feeds a safety decision.
inline constexpr double kGeomEpsilon = 1e-9;

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

// A straight path. Curvilinear coordinate x maps to origin + x * direction;
// the robot is inside the control area while x_entry <= x <= x_exit.
class PathSpec {
 public:
  PathSpec(std::string id, Vec2 origin, Vec2 direction, double length,
           double x_entry, double x_exit);

  const std::string& id() const { return id_; }
  Vec2 origin() const { return origin_; }
  Vec2 direction() const { return direction_; }
  double length() const { return length_; }
  double x_entry() const { return x_entry_; }
  double x_exit() const { return x_exit_; }

 private:
  std::string id_;
  Vec2 origin_;
  Vec2 direction_;
  double length_;
  double x_entry_;
  double x_exit_;
};

// Every robot is a disc of this diameter.
class Footprint {
 public:
  explicit Footprint(double diameter);
  double diameter() const { return diameter_; }

 private:
  double diameter_;
};

enum class SectionKind { kCrossing, kSamePath, kDisjoint };

// Selects one of the two coordinates of a pair section.
enum class Axis { kFirst, kSecond };

inline Axis other(Axis a) {
  return a == Axis::kFirst ? Axis::kSecond : Axis::kFirst;
}

struct Interval {
  double lo;
  double hi;
};

// Cross-section of the collision cylinder of two robots in the plane of
// their coordinates (x_first, x_second).
//
// kCrossing: with a = x_first - c_first and b = x_second - c_second the
// squared distance between centers is Q = a^2 + b^2 - 2 k a b, where k is the
// cosine of the angle between the path directions. The section is {Q < D^2},
// an open ellipse.
// kSamePath: both robots share one path, section {|x_first - x_second| < D}.
// kDisjoint: the robots can never touch.
class PairSection {
 public:
  static PairSection crossing(double c_first, double c_second,
                              double cos_angle, double diameter);
  static PairSection same_path(double diameter);
  static PairSection disjoint();

  SectionKind kind() const { return kind_; }
  bool empty() const { return kind_ == SectionKind::kDisjoint; }
  double diameter() const { return diameter_; }
  double center(Axis axis) const {
    return axis == Axis::kFirst ? c_first_ : c_second_;
  }
  double cos_angle() const { return cos_angle_; }

  double squared_distance(double x_first, double x_second) const;

  // Projection of the section, grown by `margin` on the diameter, onto one
  // axis. Unbounded for same-path sections, empty (lo > hi) when disjoint.
  Interval extent(Axis axis, double margin = 0.0) const;

  // The same set with the two axes exchanged.
  PairSection swapped() const;

 private:
  PairSection(SectionKind kind, double c_first, double c_second,
              double cos_angle, double diameter)
      : kind_(kind),
        c_first_(c_first),
        c_second_(c_second),
        cos_angle_(cos_angle),
        diameter_(diameter) {}

  SectionKind kind_;
  double c_first_;
  double c_second_;
  double cos_angle_;
  double diameter_;
};

Vec2 point_at(const PathSpec& path, double x);

// Throws GeometryError for distinct parallel paths closer than the diameter:
// their section is an unbounded strip.
PairSection pair_section(const PathSpec& first, const PathSpec& second,
                         const Footprint& footprint);

// Strict membership in the open section grown by `margin` on the diameter.
bool in_obstacle(const PairSection& section, double x_first, double x_second,
                 double margin = 0.0);

// Minimum of Q over the quadrant {p_w >= x_winner, p_l <= x_loser}. Only
// meaningful for crossing sections.
double shifted_min_squared_distance(const PairSection& section, Axis winner,
                                    double x_winner, double x_loser);

// Membership in the section extruded towards lower winner coordinates and
// higher loser coordinates: true iff some point of the section has
// p_winner >= x_winner and p_loser <= x_loser.
bool in_shifted_obstacle(const PairSection& section, Axis winner,
                         double x_winner, double x_loser, double margin = 0.0);

}  // namespace pcoord
