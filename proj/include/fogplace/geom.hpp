#pragma once

#include <cmath>

namespace fogplace {

// Locations live on the unit square [0,1]^2.
struct Point {
  double x{0.0};
  double y{0.0};
};

inline double distance(Point a, Point b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline bool in_unit_square(Point p) {
  return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
}

}  // namespace fogplace
