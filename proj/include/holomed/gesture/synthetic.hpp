#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "holomed/gesture/classifier.hpp"
#include "holomed/gesture/depth.hpp"

// Procedural depth scenes: a stick silhouette standing in front of a far
// wall. Used for fixtures, tests, and demos in place of a live sensor.
namespace holomed::gesture::synthetic {

struct Pose {
  int center_x = 20;
  Millimeters depth_mm = 750;
  // Horizontal arm length in pixels, measured from the torso edge.
  std::optional<int> right_arm;
  std::optional<int> left_arm;
  int arm_row = 16;
  bool arms_raised = false;
};

struct Scene {
  int width = 64;
  int height = 48;
  std::uint16_t wall_mm = 2600;
};

inline constexpr int kTorsoHalfWidth = 2;
inline constexpr int kHeadTop = 6;

DepthFrame render(const Scene& scene, const Pose& pose, TimestampMs timestamp_ms);

struct SwipeSpec {
  GestureKind direction = GestureKind::SwipeRight;  // SwipeRight or SwipeLeft
  int center_x = 18;
  Millimeters depth_mm = 750;
  int arm_row = 16;
  int short_arm = 4;
  int long_arm = 32;
  int steps = 10;        // frames spent moving
  int lead_frames = 6;   // arms-down frames before and after
  TimestampMs frame_ms = 33;
  TimestampMs start_ms = 0;
};

std::vector<DepthFrame> swipe_sequence(const Scene& scene, const SwipeSpec& spec);

// Random but unambiguous swipe parameters for the given direction.
SwipeSpec random_swipe(std::mt19937_64& rng, GestureKind direction, const Scene& scene = {});

std::vector<DepthFrame> still_sequence(const Scene& scene, const Pose& pose, int frames, TimestampMs frame_ms = 33,
                                       TimestampMs start_ms = 0);

// Adds uniform integer noise in [-amplitude, amplitude] to every valid
// reading, clamping to [1, 65535].
void add_uniform_noise(DepthFrame& frame, int amplitude, std::mt19937_64& rng);

}  // namespace holomed::gesture::synthetic
