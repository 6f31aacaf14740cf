#include "holomed/gesture/hands.hpp"

#include <cmath>
#include <stdexcept>

#include "holomed/error.hpp"

namespace holomed::gesture {

HandObservation locate_hands(const Contour& contour, const UserMask& mask, TimestampMs timestamp_ms) {
  HandObservation obs;
  obs.timestamp_ms = timestamp_ms;
  if (contour.empty() || mask.empty()) return obs;

  obs.centroid_x = mask.centroid_x();
  obs.centroid_y = mask.centroid_y();

  std::optional<Point> lo;
  std::optional<Point> hi;
  for (const auto& p : contour.points) {
    if (!(static_cast<double>(p.y) < obs.centroid_y)) continue;
    if (!hi || p.x > hi->x || (p.x == hi->x && p.y < hi->y)) hi = p;
    if (!lo || p.x < lo->x || (p.x == lo->x && p.y < lo->y)) lo = p;
  }
  if (hi && std::abs(hi->x - obs.centroid_x) > kHandCentroidTolerancePx) obs.right = hi;
  if (lo && std::abs(lo->x - obs.centroid_x) > kHandCentroidTolerancePx) obs.left = lo;
  return obs;
}

HandTrack::HandTrack(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 3) throw Error(ErrorCode::InvalidInput, "hand track capacity must be at least 3");
}

void HandTrack::push(HandObservation observation) {
  if (!window_.empty() && observation.timestamp_ms <= window_.back().timestamp_ms) {
    throw Error(ErrorCode::InvalidInput, "observation timestamps must strictly increase");
  }
  if (window_.size() == capacity_) window_.pop_front();
  window_.push_back(std::move(observation));
}

int round_third_half_up(long long sum) {
  // floor(sum / 3 + 1/2) == floor((2 * sum + 3) / 6)
  const long long num = 2 * sum + 3;
  long long q = num / 6;
  if (num % 6 != 0 && num < 0) --q;
  return static_cast<int>(q);
}

std::optional<Point> smooth_position(const HandTrack& track, std::size_t t, Side side) {
  if (t == 0 || t + 1 >= track.size()) return std::nullopt;
  long long sx = 0;
  long long sy = 0;
  for (std::size_t i = t - 1; i <= t + 1; ++i) {
    const auto& hand = side == Side::Right ? track[i].right : track[i].left;
    if (!hand) return std::nullopt;
    sx += hand->x;
    sy += hand->y;
  }
  return Point{round_third_half_up(sx), round_third_half_up(sy)};
}

}  // namespace holomed::gesture
