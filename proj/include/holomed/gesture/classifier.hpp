#pragma once

#include <string_view>
#include <vector>

#include "holomed/gesture/hands.hpp"

namespace holomed::gesture {

enum class GestureKind { None, SwipeRight, SwipeLeft, RaiseBoth, HoldStill };

std::string_view to_string(GestureKind kind);
GestureKind gesture_kind_from_string(std::string_view name);

inline constexpr TimestampMs kDefaultWindowMs = 800;

inline double default_threshold_px(int frame_width) { return 0.25 * frame_width; }

struct TimedPoint {
  TimestampMs timestamp_ms = 0;
  Point point;
};

// Smoothed positions of one side for every window index where they exist.
std::vector<TimedPoint> smoothed_series(const HandTrack& track, Side side);

// Decision without side effects. The evaluation window ends at the newest
// smoothable observation and reaches back window_ms.
//   swipe:      the newest right-hand x moved >= threshold from some earlier
//               point in the window (best suffix); equal left/right gains
//               cancel out.
//   RaiseBoth:  both hands at least threshold above the centroid across the
//               whole window.
//   HoldStill:  right hand within threshold/4 of where it started, across
//               the whole window.
GestureKind evaluate_gesture(const HandTrack& track, double threshold_px,
                             TimestampMs window_ms = kDefaultWindowMs);

// evaluate_gesture, then flush the track after any non-None result so one
// motion is never reported twice.
GestureKind classify_gesture(HandTrack& track, double threshold_px, TimestampMs window_ms = kDefaultWindowMs);

}  // namespace holomed::gesture
