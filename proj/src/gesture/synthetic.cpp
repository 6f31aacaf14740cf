#include "holomed/gesture/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "holomed/error.hpp"

namespace holomed::gesture::synthetic {

namespace {

void fill(DepthFrame& f, int x0, int y0, int x1, int y1, std::uint16_t depth) {
  for (int y = std::max(0, y0); y <= std::min(f.height - 1, y1); ++y)
    for (int x = std::max(0, x0); x <= std::min(f.width - 1, x1); ++x) f.at(x, y) = depth;
}

void thick_line(DepthFrame& f, int x0, int y0, int x1, int y1, std::uint16_t depth) {
  const int n = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  for (int i = 0; i <= n; ++i) {
    const double t = n == 0 ? 0.0 : static_cast<double>(i) / n;
    const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
    const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
    fill(f, x, y, x + 1, y + 1, depth);
  }
}

}  // namespace

DepthFrame render(const Scene& scene, const Pose& pose, TimestampMs timestamp_ms) {
  DepthFrame f(scene.width, scene.height, timestamp_ms, scene.wall_mm);
  const auto d = static_cast<std::uint16_t>(pose.depth_mm);
  const int cx = pose.center_x;
  fill(f, cx - kTorsoHalfWidth, kHeadTop, cx + kTorsoHalfWidth, scene.height - 1, d);
  if (pose.arms_raised) {
    thick_line(f, cx + kTorsoHalfWidth + 1, 17, cx + 12, 2, d);
    thick_line(f, cx - kTorsoHalfWidth - 2, 17, cx - 13, 2, d);
    return f;
  }
  if (pose.right_arm && *pose.right_arm > 0) {
    fill(f, cx + kTorsoHalfWidth + 1, pose.arm_row, cx + kTorsoHalfWidth + *pose.right_arm, pose.arm_row + 1, d);
  }
  if (pose.left_arm && *pose.left_arm > 0) {
    fill(f, cx - kTorsoHalfWidth - *pose.left_arm, pose.arm_row, cx - kTorsoHalfWidth - 1, pose.arm_row + 1, d);
  }
  return f;
}

std::vector<DepthFrame> swipe_sequence(const Scene& scene, const SwipeSpec& spec) {
  if (spec.direction != GestureKind::SwipeRight && spec.direction != GestureKind::SwipeLeft) {
    throw Error(ErrorCode::InvalidInput, "swipe direction must be SwipeRight or SwipeLeft");
  }
  if (spec.steps < 2) throw Error(ErrorCode::InvalidInput, "swipe needs at least two steps");
  std::vector<DepthFrame> frames;
  TimestampMs ts = spec.start_ms;
  Pose pose{spec.center_x, spec.depth_mm, std::nullopt, std::nullopt, spec.arm_row, false};
  for (int i = 0; i < spec.lead_frames; ++i, ts += spec.frame_ms) frames.push_back(render(scene, pose, ts));
  const bool outward = spec.direction == GestureKind::SwipeRight;
  for (int i = 0; i < spec.steps; ++i, ts += spec.frame_ms) {
    const double t = static_cast<double>(i) / (spec.steps - 1);
    const double a = outward ? spec.short_arm + t * (spec.long_arm - spec.short_arm)
                             : spec.long_arm - t * (spec.long_arm - spec.short_arm);
    pose.right_arm = static_cast<int>(std::lround(a));
    frames.push_back(render(scene, pose, ts));
  }
  pose.right_arm.reset();
  for (int i = 0; i < spec.lead_frames; ++i, ts += spec.frame_ms) frames.push_back(render(scene, pose, ts));
  return frames;
}

SwipeSpec random_swipe(std::mt19937_64& rng, GestureKind direction, const Scene& scene) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  SwipeSpec spec;
  spec.direction = direction;
  spec.depth_mm = uniform(720, 780);
  spec.arm_row = uniform(14, 18);
  spec.short_arm = uniform(4, 6);
  spec.steps = uniform(8, 14);
  spec.lead_frames = uniform(4, 8);
  spec.frame_ms = uniform(30, 40);
  spec.start_ms = uniform(0, 1000);
  // Span must clear the 25% threshold after three-tap smoothing eats two steps.
  const int span = uniform(scene.width * 7 / 16, scene.width / 2);
  spec.long_arm = spec.short_arm + span;
  const int max_cx = scene.width - 2 - kTorsoHalfWidth - spec.long_arm;
  spec.center_x = uniform(std::min(10, max_cx), max_cx);
  return spec;
}

std::vector<DepthFrame> still_sequence(const Scene& scene, const Pose& pose, int frames, TimestampMs frame_ms,
                                       TimestampMs start_ms) {
  std::vector<DepthFrame> out;
  for (int i = 0; i < frames; ++i) out.push_back(render(scene, pose, start_ms + i * frame_ms));
  return out;
}

void add_uniform_noise(DepthFrame& frame, int amplitude, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> noise(-amplitude, amplitude);
  for (auto& s : frame.samples) {
    if (s == 0) continue;
    s = static_cast<std::uint16_t>(std::clamp(static_cast<int>(s) + noise(rng), 1, 65535));
  }
}

}  // namespace holomed::gesture::synthetic
