#include "holomed/gesture/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "holomed/error.hpp"

namespace holomed::gesture {

std::string_view to_string(GestureKind kind) {
  switch (kind) {
    case GestureKind::None: return "None";
    case GestureKind::SwipeRight: return "SwipeRight";
    case GestureKind::SwipeLeft: return "SwipeLeft";
    case GestureKind::RaiseBoth: return "RaiseBoth";
    case GestureKind::HoldStill: return "HoldStill";
  }
  return "None";
}

GestureKind gesture_kind_from_string(std::string_view name) {
  for (auto k : {GestureKind::None, GestureKind::SwipeRight, GestureKind::SwipeLeft, GestureKind::RaiseBoth,
                 GestureKind::HoldStill}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidInput, "unknown gesture kind '" + std::string(name) + "'");
}

std::vector<TimedPoint> smoothed_series(const HandTrack& track, Side side) {
  std::vector<TimedPoint> out;
  for (std::size_t t = 1; t + 1 < track.size(); ++t) {
    if (auto p = smooth_position(track, t, side)) out.push_back({track[t].timestamp_ms, *p});
  }
  return out;
}

namespace {

// Indices [first, newest] of the trailing run where `ok(t)` holds, provided
// the run starts at or before the window boundary. Empty when the run does
// not cover the whole window.
template <typename Pred>
std::optional<std::pair<std::size_t, std::size_t>> covering_run(const HandTrack& track, TimestampMs window_ms,
                                                                 Pred ok) {
  if (track.size() < 3) return std::nullopt;
  const std::size_t newest = track.size() - 2;
  const TimestampMs boundary = track[newest].timestamp_ms - window_ms;
  std::size_t t = newest;
  while (true) {
    if (!ok(t)) return std::nullopt;
    if (track[t].timestamp_ms <= boundary) return std::pair{t, newest};
    if (t == 1) return std::nullopt;
    --t;
  }
}

}  // namespace

GestureKind evaluate_gesture(const HandTrack& track, double threshold_px, TimestampMs window_ms) {
  if (track.size() < 3) return GestureKind::None;
  const TimestampMs anchor = track[track.size() - 2].timestamp_ms;
  const TimestampMs window_start = anchor - window_ms;

  std::vector<TimedPoint> right;
  for (const auto& tp : smoothed_series(track, Side::Right)) {
    if (tp.timestamp_ms >= window_start) right.push_back(tp);
  }

  if (right.size() >= 3) {
    const int last_x = right.back().point.x;
    int min_x = last_x;
    int max_x = last_x;
    for (const auto& tp : right) {
      min_x = std::min(min_x, tp.point.x);
      max_x = std::max(max_x, tp.point.x);
    }
    const double gain_right = last_x - min_x;
    const double gain_left = max_x - last_x;
    if (gain_right >= threshold_px && gain_right > gain_left) return GestureKind::SwipeRight;
    if (gain_left >= threshold_px && gain_left > gain_right) return GestureKind::SwipeLeft;
  }

  const auto raised = covering_run(track, window_ms, [&](std::size_t t) {
    const auto l = smooth_position(track, t, Side::Left);
    const auto r = smooth_position(track, t, Side::Right);
    if (!l || !r) return false;
    const double limit = track[t].centroid_y - threshold_px;
    return l->y <= limit && r->y <= limit;
  });
  if (raised) return GestureKind::RaiseBoth;

  const auto still = covering_run(track, window_ms, [&](std::size_t t) {
    return smooth_position(track, t, Side::Right).has_value();
  });
  if (still) {
    const auto origin = *smooth_position(track, still->first, Side::Right);
    double worst = 0.0;
    for (std::size_t t = still->first; t <= still->second; ++t) {
      const auto p = *smooth_position(track, t, Side::Right);
      worst = std::max(worst, std::hypot(p.x - origin.x, p.y - origin.y));
    }
    if (worst <= threshold_px / 4.0) return GestureKind::HoldStill;
  }
  return GestureKind::None;
}

GestureKind classify_gesture(HandTrack& track, double threshold_px, TimestampMs window_ms) {
  const auto kind = evaluate_gesture(track, threshold_px, window_ms);
  if (kind != GestureKind::None) track.clear();
  return kind;
}

}  // namespace holomed::gesture
