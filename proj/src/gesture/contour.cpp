#include "holomed/gesture/contour.hpp"

#include <array>
#include <stdexcept>

#include "holomed/error.hpp"

namespace holomed::gesture {

namespace {

// Neighbour offsets in counter-clockwise screen order starting west.
constexpr std::array<Point, 8> kRing{{{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

int ring_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kRing[i].x == dx && kRing[i].y == dy) return i;
  }
  throw std::logic_error("offset is not an 8-neighbour");
}

}  // namespace

bool is_border_pixel(const UserMask& mask, int x, int y) {
  if (!mask.test(x, y)) return false;
  if (x == 0 || y == 0 || x == mask.width - 1 || y == mask.height - 1) return true;
  return !mask.test(x - 1, y) || !mask.test(x + 1, y) || !mask.test(x, y - 1) || !mask.test(x, y + 1);
}

Contour trace_contour(const UserMask& mask) {
  if (mask.empty()) throw Error(ErrorCode::Precondition, "cannot trace an empty mask");

  Point start{-1, -1};
  for (int x = 0; x < mask.width && start.x < 0; ++x) {
    for (int y = 0; y < mask.height; ++y) {
      if (mask.test(x, y)) {
        start = {x, y};
        break;
      }
    }
  }

  Contour contour;
  contour.points.push_back(start);

  // The pixel west of the leftmost column is never set, so tracing starts
  // with a western backtrack. Tracing stops when the first move repeats.
  Point current = start;
  int backtrack = 0;
  Point first_move{};
  int first_backtrack = 0;
  const std::size_t limit = 8 * mask.pixel_count + 16;

  for (std::size_t step = 0; step < limit; ++step) {
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int d = (backtrack + k) % 8;
      if (mask.test(current.x + kRing[d].x, current.y + kRing[d].y)) {
        found = d;
        break;
      }
    }
    if (found < 0) return contour;  // isolated pixel

    const Point next{current.x + kRing[found].x, current.y + kRing[found].y};
    const int prev = (found + 7) % 8;
    const Point behind{current.x + kRing[prev].x, current.y + kRing[prev].y};
    const int next_backtrack = ring_index(behind.x - next.x, behind.y - next.y);

    if (step == 0) {
      first_move = next;
      first_backtrack = next_backtrack;
    } else if (current == start && next == first_move && next_backtrack == first_backtrack) {
      contour.points.pop_back();  // closing copy of start
      return contour;
    }
    contour.points.push_back(next);
    current = next;
    backtrack = next_backtrack;
  }
  throw std::logic_error("contour tracing did not terminate");
}

}  // namespace holomed::gesture
