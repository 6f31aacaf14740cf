#pragma once

#include <vector>

#include "holomed/gesture/depth.hpp"

namespace holomed::gesture {

// Closed outer boundary of a mask. Points run counter-clockwise as seen on
// screen (y grows downward), consecutive points are 8-neighbours, and the
// first point is the smallest (x, y) set pixel. Pixels on one-pixel-wide
// spurs appear more than once.
struct Contour {
  std::vector<Point> points;

  bool empty() const noexcept { return points.empty(); }
};

// Moore-neighbour tracing; stops when the first move out of the start pixel
// repeats. Throws Error{Precondition} for an empty mask.
Contour trace_contour(const UserMask& mask);

// True when (x, y) is set and has an unset 4-neighbour or touches the edge.
bool is_border_pixel(const UserMask& mask, int x, int y);

}  // namespace holomed::gesture
