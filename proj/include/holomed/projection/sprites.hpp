#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "holomed/projection/schedule.hpp"

namespace holomed::projection {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;  // row-major, 4 bytes per pixel

  std::array<std::uint8_t, 4> pixel(int x, int y) const;
  friend bool operator==(const Image&, const Image&) = default;
};

// libpng; throws Error{Asset} (read) or Error{Io} (write).
void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

struct SheetInfo {
  int sheet_id = 1;
  std::string file;
  int frame_count = kFramesPerSheet;
  bool final_still = false;
  std::map<View, int> view_offsets;  // first cell of each view block

  friend bool operator==(const SheetInfo&, const SheetInfo&) = default;
};

// A loaded spritesheet pack: manifest.json plus one PNG per sheet, cells
// laid out row-major `columns` wide.
struct SpritePack {
  std::filesystem::path dir;
  int cell_width = 64;
  int cell_height = 64;
  int columns = 10;
  std::vector<SheetInfo> sheets;

  int total_frames() const;
  // Throws Error{Asset} for an unknown sheet id.
  const SheetInfo& sheet(int sheet_id) const;
};

nlohmann::json manifest_json(const SpritePack& pack);

// Parses manifest.json and checks ids 1..8, 40 frames per animated sheet,
// one final still, all three view blocks, a 281 frame total, and that every
// PNG exists and is large enough for its cells. Throws Error{Asset}.
SpritePack load_sprite_pack(const std::filesystem::path& dir);

// Four face entries: Front, Right (lateral view), Posterior, Left (lateral
// view mirrored). On the final sheet every face shows the final still.
// quarter_turn shifts each successive face by a further 90° of rotation
// (10 frames) instead of showing all four at the same phase.
std::array<FaceEntry, 4> face_views(const SheetInfo& sheet, int frame_index, const PyramidGeometry& geometry,
                                    bool quarter_turn = false);

struct ScheduleParams {
  int fps = kMinFps;
  int rotation_period_ms = kDefaultRotationPeriodMs;
  PyramidGeometry geometry;
  bool quarter_turn_faces = false;
};

FrameSchedule make_schedule(const SpritePack& pack, int sheet_id, std::int64_t tick, const ScheduleParams& params);

// Placeholder artwork: each cell shows the sheet numeral and a tick mark
// rotated clockwise from 12 o'clock by frame·9°, tinted per view.
inline double tick_mark_angle_deg(int frame) { return frame * kDegreesPerFrame; }
Image render_placeholder_cell(int sheet_id, View view, int frame_index, int cell_size);
Image render_placeholder_sheet(int sheet_id, int cell_size = 64, int columns = 10);

// Writes manifest.json and sheet1.png..sheet8.png; returns the loaded pack.
SpritePack generate_placeholder_pack(const std::filesystem::path& dir, int cell_size = 64);

}  // namespace holomed::projection
