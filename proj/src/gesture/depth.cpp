#include "holomed/gesture/depth.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "holomed/error.hpp"

namespace holomed::gesture {

void DepthFrame::validate() const {
  if (width < 8 || height < 8) {
    throw Error(ErrorCode::InvalidInput,
                "frame must be at least 8x8, got " + std::to_string(width) + "x" + std::to_string(height));
  }
  if (samples.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidInput, "sample count " + std::to_string(samples.size()) +
                                             " does not match " + std::to_string(width) + "x" +
                                             std::to_string(height));
  }
}

void GateConfig::validate() const {
  if (!(0 < gate_min && gate_min < gate_max)) {
    throw Error(ErrorCode::Validation, "require 0 < gate_min < gate_max", "gate");
  }
  if (!(gate_min <= band_min && band_min < band_max && band_max <= gate_max)) {
    throw Error(ErrorCode::Validation, "require gate_min <= band_min < band_max <= gate_max", "band");
  }
}

double UserMask::centroid_x() const {
  if (pixel_count == 0) return 0.0;
  double sum = 0.0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (bits[static_cast<std::size_t>(y) * width + x]) sum += x;
  return sum / static_cast<double>(pixel_count);
}

double UserMask::centroid_y() const {
  if (pixel_count == 0) return 0.0;
  double sum = 0.0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (bits[static_cast<std::size_t>(y) * width + x]) sum += y;
  return sum / static_cast<double>(pixel_count);
}

std::string_view to_string(DistanceStatus status) {
  switch (status) {
    case DistanceStatus::InBand: return "InBand";
    case DistanceStatus::TooClose: return "TooClose";
    case DistanceStatus::TooFar: return "TooFar";
    case DistanceStatus::OutOfGate: return "OutOfGate";
  }
  return "OutOfGate";
}

DistanceStatus distance_status_from_string(std::string_view name) {
  for (auto s : {DistanceStatus::InBand, DistanceStatus::TooClose, DistanceStatus::TooFar,
                 DistanceStatus::OutOfGate}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::InvalidInput, "unknown distance status '" + std::string(name) + "'");
}

std::vector<std::uint16_t> median_filter(const DepthFrame& frame) {
  frame.validate();
  const int w = frame.width;
  const int h = frame.height;
  std::vector<std::uint16_t> out(frame.samples.size(), 0);
  std::array<std::uint16_t, 9> window{};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (frame.at(x, y) == 0) continue;
      std::size_t n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const auto v = frame.at(nx, ny);
          if (v != 0) window[n++] = v;
        }
      }
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>((n - 1) / 2);
      std::nth_element(window.begin(), mid, window.begin() + static_cast<std::ptrdiff_t>(n));
      out[static_cast<std::size_t>(y) * w + x] = *mid;
    }
  }
  return out;
}

namespace {

struct Component {
  std::vector<std::size_t> pixels;
  int top = 0;
  int left = 0;
};

}  // namespace

UserMask segment_user(const DepthFrame& frame, const GateConfig& gate) {
  const auto filtered = median_filter(frame);
  const int w = frame.width;
  const int h = frame.height;
  const auto in_gate = [&](std::size_t i) {
    const int v = filtered[i];
    return v >= gate.gate_min && v <= gate.gate_max;
  };

  std::vector<std::uint8_t> seen(filtered.size(), 0);
  std::vector<std::size_t> stack;
  Component best;
  bool have_best = false;

  for (std::size_t start = 0; start < filtered.size(); ++start) {
    if (seen[start] || !in_gate(start)) continue;
    Component comp;
    comp.top = h;
    comp.left = w;
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      comp.pixels.push_back(i);
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      comp.top = std::min(comp.top, y);
      comp.left = std::min(comp.left, x);
      const std::array<std::pair<int, int>, 4> steps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
      for (auto [dx, dy] : steps) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const auto j = static_cast<std::size_t>(ny) * w + nx;
        if (!seen[j] && in_gate(j)) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    // Larger wins; equal sizes go to the smaller (top, left) bounding-box
    // corner. Raster discovery order settles anything left.
    const bool better = !have_best || comp.pixels.size() > best.pixels.size() ||
                        (comp.pixels.size() == best.pixels.size() &&
                         std::pair(comp.top, comp.left) < std::pair(best.top, best.left));
    if (better) {
      best = std::move(comp);
      have_best = true;
    }
  }

  UserMask mask;
  mask.width = w;
  mask.height = h;
  mask.bits.assign(filtered.size(), 0);
  if (!have_best) return mask;

  std::vector<std::uint16_t> depths;
  depths.reserve(best.pixels.size());
  for (auto i : best.pixels) {
    mask.bits[i] = 1;
    depths.push_back(filtered[i]);
  }
  mask.pixel_count = best.pixels.size();
  const auto mid = depths.begin() + static_cast<std::ptrdiff_t>((depths.size() - 1) / 2);
  std::nth_element(depths.begin(), mid, depths.end());
  mask.median_depth_mm = *mid;
  return mask;
}

DistanceStatus distance_status(const UserMask& mask, const GateConfig& gate) {
  if (mask.empty()) return DistanceStatus::OutOfGate;
  if (mask.median_depth_mm < gate.band_min) return DistanceStatus::TooClose;
  if (mask.median_depth_mm > gate.band_max) return DistanceStatus::TooFar;
  return DistanceStatus::InBand;
}

}  // namespace holomed::gesture
