#pragma once

// Brute-force reference implementations used only by tests. They use
// different algorithms from the library (union-find labelling, padded
// flood fill, exhaustive suffix enumeration) so agreement means something.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "holomed/gesture/classifier.hpp"
#include "holomed/gesture/depth.hpp"

namespace holomed::oracle {

using gesture::Point;
using gesture::UserMask;

inline std::set<std::pair<int, int>> border_set(const UserMask& m) {
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      if (!m.test(x, y)) continue;
      bool edge = x == 0 || y == 0 || x == m.width - 1 || y == m.height - 1;
      bool open = !m.test(x - 1, y) || !m.test(x + 1, y) || !m.test(x, y - 1) || !m.test(x, y + 1);
      if (edge || open) out.insert({x, y});
    }
  return out;
}

// Border pixels that touch the background region connected to the outside
// of the image (the part of the border an outer contour can reach).
inline std::set<std::pair<int, int>> exterior_border_set(const UserMask& m) {
  const int W = m.width + 2;
  const int H = m.height + 2;
  std::vector<char> outside(static_cast<std::size_t>(W) * H, 0);
  auto set_in_padded = [&](int px, int py) { return m.test(px - 1, py - 1); };
  std::queue<std::pair<int, int>> q;
  q.push({0, 0});
  outside[0] = 1;
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int nx = x + dx[k], ny = y + dy[k];
      if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
      auto idx = static_cast<std::size_t>(ny) * W + nx;
      if (outside[idx] || set_in_padded(nx, ny)) continue;
      outside[idx] = 1;
      q.push({nx, ny});
    }
  }
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      if (!m.test(x, y)) continue;
      const int px = x + 1, py = y + 1;
      auto o = [&](int ax, int ay) { return outside[static_cast<std::size_t>(ay) * W + ax] != 0; };
      if (o(px - 1, py) || o(px + 1, py) || o(px, py - 1) || o(px, py + 1)) out.insert({x, y});
    }
  return out;
}

inline bool has_holes(const UserMask& m) { return border_set(m) != exterior_border_set(m); }

struct Labelled {
  std::vector<int> label;  // -1 for background
  std::map<int, std::vector<std::size_t>> members;
};

// Union-find labelling of a binary grid with 4-connectivity.
inline Labelled label_components(int w, int h, const std::vector<char>& on) {
  std::vector<int> parent(on.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      if (!on[i]) continue;
      if (x + 1 < w && on[i + 1]) unite(i, i + 1);
      if (y + 1 < h && on[i + w]) unite(i, i + w);
    }
  Labelled out;
  out.label.assign(on.size(), -1);
  for (int i = 0; i < static_cast<int>(on.size()); ++i) {
    if (!on[i]) continue;
    out.label[i] = find(i);
    out.members[out.label[i]].push_back(static_cast<std::size_t>(i));
  }
  return out;
}

// Expected retained pixel set for segment_user given already-filtered depths.
inline std::vector<std::uint8_t> largest_component(int w, int h, const std::vector<std::uint16_t>& depth,
                                                   int gate_min, int gate_max) {
  std::vector<char> on(depth.size());
  for (std::size_t i = 0; i < depth.size(); ++i) on[i] = depth[i] >= gate_min && depth[i] <= gate_max;
  auto lab = label_components(w, h, on);
  const std::vector<std::size_t>* best = nullptr;
  std::pair<int, int> best_corner{};
  for (auto& [root, px] : lab.members) {
    int top = h, left = w;
    for (auto i : px) {
      top = std::min(top, static_cast<int>(i) / w);
      left = std::min(left, static_cast<int>(i) % w);
    }
    std::pair<int, int> corner{top, left};
    if (!best || px.size() > best->size() || (px.size() == best->size() && corner < best_corner)) {
      best = &px;
      best_corner = corner;
    }
  }
  std::vector<std::uint8_t> bits(depth.size(), 0);
  if (best)
    for (auto i : *best) bits[i] = 1;
  return bits;
}

// Exact half-up rounding of sum/3 by search: n - 1/2 <= sum/3 < n + 1/2.
inline int rational_third_half_up(long long sum) {
  for (long long n = sum / 3 - 2; n <= sum / 3 + 2; ++n) {
    if (6 * n - 3 <= 2 * sum && 2 * sum < 6 * n + 3) return static_cast<int>(n);
  }
  return INT32_MIN;
}

// Swipe decision by enumerating every suffix of the window explicitly.
inline gesture::GestureKind swipe_by_suffixes(const std::vector<int>& xs, double threshold) {
  if (xs.size() < 3) return gesture::GestureKind::None;
  double best_right = 0, best_left = 0;
  for (std::size_t s = 0; s + 1 <= xs.size(); ++s) {
    const double d = xs.back() - xs[s];
    best_right = std::max(best_right, d);
    best_left = std::max(best_left, -d);
  }
  if (best_right >= threshold && best_right > best_left) return gesture::GestureKind::SwipeRight;
  if (best_left >= threshold && best_left > best_right) return gesture::GestureKind::SwipeLeft;
  return gesture::GestureKind::None;
}

// Random binary mask of the given size built from overlapping rectangles,
// then reduced to its largest 4-connected component.
inline UserMask random_blob_mask(std::mt19937_64& rng, int w, int h) {
  std::vector<char> on(static_cast<std::size_t>(w) * h, 0);
  std::uniform_int_distribution<int> nrect(1, 6);
  const int rects = nrect(rng);
  for (int r = 0; r < rects; ++r) {
    int x0 = std::uniform_int_distribution<int>(0, w - 1)(rng);
    int y0 = std::uniform_int_distribution<int>(0, h - 1)(rng);
    int x1 = std::uniform_int_distribution<int>(x0, std::min(w - 1, x0 + w / 2))(rng);
    int y1 = std::uniform_int_distribution<int>(y0, std::min(h - 1, y0 + h / 2))(rng);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) on[static_cast<std::size_t>(y) * w + x] = 1;
  }
  // Sprinkle single-pixel noise so shapes get spurs, notches and holes.
  std::bernoulli_distribution flip(0.08);
  for (auto& v : on)
    if (flip(rng)) v = !v;
  auto lab = label_components(w, h, on);
  UserMask m;
  m.width = w;
  m.height = h;
  m.bits.assign(on.size(), 0);
  const std::vector<std::size_t>* best = nullptr;
  for (auto& [root, px] : lab.members)
    if (!best || px.size() > best->size()) best = &px;
  if (best)
    for (auto i : *best) m.bits[i] = 1;
  m.pixel_count = best ? best->size() : 0;
  m.median_depth_mm = 750;
  return m;
}

// Fills every hole of the mask (background not connected to the outside).
inline UserMask fill_holes(UserMask m) {
  const int W = m.width + 2, H = m.height + 2;
  std::vector<char> outside(static_cast<std::size_t>(W) * H, 0);
  std::queue<std::pair<int, int>> q;
  q.push({0, 0});
  outside[0] = 1;
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int nx = x + dx[k], ny = y + dy[k];
      if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
      auto idx = static_cast<std::size_t>(ny) * W + nx;
      if (outside[idx] || m.test(nx - 1, ny - 1)) continue;
      outside[idx] = 1;
      q.push({nx, ny});
    }
  }
  m.pixel_count = 0;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      auto& b = m.bits[static_cast<std::size_t>(y) * m.width + x];
      if (!outside[static_cast<std::size_t>(y + 1) * W + x + 1]) b = 1;
      m.pixel_count += b;
    }
  return m;
}

}  // namespace holomed::oracle
