#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace holomed::gesture {

using Millimeters = std::int32_t;
using TimestampMs = std::int64_t;

struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

// Row-major depth grid in millimeters, 0 meaning "no reading".
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> samples;
  TimestampMs timestamp_ms = 0;

  DepthFrame() = default;
  DepthFrame(int w, int h, TimestampMs ts = 0, std::uint16_t fill = 0)
      : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill), timestamp_ms(ts) {}

  std::uint16_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::uint16_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }

  // Throws Error{InvalidInput} on size mismatch or a grid smaller than 8x8.
  void validate() const;
};

struct GateConfig {
  Millimeters gate_min = 400;
  Millimeters gate_max = 1500;
  Millimeters band_min = 700;
  Millimeters band_max = 800;

  void validate() const;
};

struct UserMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;
  Millimeters median_depth_mm = 0;
  std::size_t pixel_count = 0;

  bool empty() const noexcept { return pixel_count == 0; }
  bool test(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height &&
           bits[static_cast<std::size_t>(y) * width + x] != 0;
  }

  // Mean pixel position of the set bits; (0,0) for an empty mask.
  double centroid_x() const;
  double centroid_y() const;
};

enum class DistanceStatus { InBand, TooClose, TooFar, OutOfGate };

std::string_view to_string(DistanceStatus status);
DistanceStatus distance_status_from_string(std::string_view name);

// 3x3 median over valid (non-zero) readings; zero samples stay zero. Edge
// pixels use whichever neighbours exist. Even-sized windows take the lower
// median so the result is always one of the observed depths.
std::vector<std::uint16_t> median_filter(const DepthFrame& frame);

// Filters, gates, and keeps the largest 4-connected in-gate component.
UserMask segment_user(const DepthFrame& frame, const GateConfig& gate);

DistanceStatus distance_status(const UserMask& mask, const GateConfig& gate);

}  // namespace holomed::gesture
