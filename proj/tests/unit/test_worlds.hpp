#pragma once

#include <vector>

#include "pcoord/priority.hpp"

namespace pcoord::testing {

// Two perpendicular paths "h" and "v" crossing at coordinate 10 on both.
inline WorldModel CrossWorld(double diameter = 1.0) {
  return WorldModel(
      {PathSpec("h", {0, 0}, {1, 0}, 30, 4, 16),
       PathSpec("v", {10, -10}, {0, 1}, 30, 4, 16)},
      Footprint(diameter));
}

// Four paths: two eastbound lanes and two northbound lanes, 1.2 apart.
inline WorldModel GridWorld() {
  return WorldModel(
      {PathSpec("e0", {-15, -0.6}, {1, 0}, 30, 7, 23),
       PathSpec("e1", {-15, -1.8}, {1, 0}, 30, 7, 23),
       PathSpec("n0", {0.6, -15}, {0, 1}, 30, 7, 23),
       PathSpec("n1", {1.8, -15}, {0, 1}, 30, 7, 23)},
      Footprint(1.0));
}

inline RobotId Id(std::uint32_t i) { return static_cast<RobotId>(i); }

}  // namespace pcoord::testing
