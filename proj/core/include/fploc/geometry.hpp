#pragma once

#include <cmath>
#include <vector>

namespace fploc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Rectangular localization space with fixed anchor positions.
struct Room {
  double width = 0.0;
  double height = 0.0;
  std::vector<Point2> ap_positions;

  bool contains(const Point2& p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }
};

// Ordered set of surveyed training locations.
struct Grid {
  std::vector<Point2> points;
  double spacing = 0.0;
};

}  // namespace fploc
