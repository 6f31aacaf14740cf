#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "holomed/gesture/contour.hpp"
#include "holomed/gesture/depth.hpp"

namespace holomed::gesture {

struct HandObservation {
  TimestampMs timestamp_ms = 0;
  std::optional<Point> left;
  std::optional<Point> right;
  // Silhouette centroid, needed to judge raised hands later.
  double centroid_x = 0.0;
  double centroid_y = 0.0;
};

enum class Side { Left, Right };

// Arms-down tolerance: an extremal point this close (in x) to the silhouette
// centroid is treated as torso, not hand.
inline constexpr double kHandCentroidTolerancePx = 2.0;

HandObservation locate_hands(const Contour& contour, const UserMask& mask, TimestampMs timestamp_ms = 0);

// Bounded FIFO of recent observations, oldest first.
class HandTrack {
 public:
  explicit HandTrack(std::size_t capacity = 32);

  void push(HandObservation observation);
  void clear() { window_.clear(); }

  std::size_t size() const noexcept { return window_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return window_.empty(); }
  const HandObservation& operator[](std::size_t i) const { return window_[i]; }
  const HandObservation& back() const { return window_.back(); }

 private:
  std::size_t capacity_;
  std::deque<HandObservation> window_;
};

// Three-tap mean of window positions t-1, t, t+1 for one side, rounded
// half-up. nullopt means "not ready": a neighbour is missing or the side is
// absent in one of the three observations.
std::optional<Point> smooth_position(const HandTrack& track, std::size_t t, Side side = Side::Right);

// Half-up rounding of numerator/3, exact for any integer sum.
int round_third_half_up(long long sum);

}  // namespace holomed::gesture
