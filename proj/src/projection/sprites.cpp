#include "holomed/projection/sprites.hpp"

#include <png.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "holomed/error.hpp"

namespace holomed::projection {

namespace fs = std::filesystem;

std::array<std::uint8_t, 4> Image::pixel(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width + x) * 4;
  return {rgba[i], rgba[i + 1], rgba[i + 2], rgba[i + 3]};
}

void write_png(const fs::path& path, const Image& image) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGBA;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.rgba.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("png write failed: ") + png.message, path.string());
  }
}

Image read_png(const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw Error(ErrorCode::Asset, std::string("cannot read png: ") + png.message, path.string());
  }
  png.format = PNG_FORMAT_RGBA;
  Image out;
  out.width = static_cast<int>(png.width);
  out.height = static_cast<int>(png.height);
  out.rgba.resize(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, out.rgba.data(), 0, nullptr)) {
    throw Error(ErrorCode::Asset, std::string("cannot decode png: ") + png.message, path.string());
  }
  return out;
}

int SpritePack::total_frames() const {
  int total = 0;
  for (const auto& s : sheets) total += s.frame_count;
  return total;
}

const SheetInfo& SpritePack::sheet(int sheet_id) const {
  for (const auto& s : sheets)
    if (s.sheet_id == sheet_id) return s;
  throw Error(ErrorCode::Asset, "no sheet " + std::to_string(sheet_id), "sheets");
}

nlohmann::json manifest_json(const SpritePack& pack) {
  nlohmann::json sheets = nlohmann::json::array();
  for (const auto& s : pack.sheets) {
    nlohmann::json views = nlohmann::json::object();
    for (const auto& [view, offset] : s.view_offsets) views[std::string(to_string(view))] = offset;
    sheets.push_back({{"sheet_id", s.sheet_id},
                      {"file", s.file},
                      {"frame_count", s.frame_count},
                      {"final", s.final_still},
                      {"views", std::move(views)}});
  }
  return {{"cell_width", pack.cell_width},
          {"cell_height", pack.cell_height},
          {"columns", pack.columns},
          {"total_frames", pack.total_frames()},
          {"sheets", std::move(sheets)}};
}

namespace {

[[noreturn]] void asset_fail(const std::string& where, const std::string& message) {
  throw Error(ErrorCode::Asset, message, where);
}

}  // namespace

SpritePack load_sprite_pack(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) asset_fail(manifest_path.string(), "manifest not found");

  SpritePack pack;
  pack.dir = dir;
  try {
    const auto j = nlohmann::json::parse(in);
    pack.cell_width = j.at("cell_width").get<int>();
    pack.cell_height = j.at("cell_height").get<int>();
    pack.columns = j.at("columns").get<int>();
    for (const auto& s : j.at("sheets")) {
      SheetInfo info;
      info.sheet_id = s.at("sheet_id").get<int>();
      info.file = s.at("file").get<std::string>();
      info.frame_count = s.at("frame_count").get<int>();
      info.final_still = s.value("final", false);
      for (const auto& [name, offset] : s.at("views").items()) info.view_offsets[view_from_string(name)] = offset.get<int>();
      pack.sheets.push_back(std::move(info));
    }
  } catch (const nlohmann::json::exception& e) {
    asset_fail(manifest_path.string(), e.what());
  } catch (const Error& e) {
    asset_fail(manifest_path.string(), e.what());
  }

  if (pack.cell_width <= 0 || pack.cell_height <= 0 || pack.columns <= 0) {
    asset_fail(manifest_path.string(), "cell size and columns must be positive");
  }
  std::map<int, const SheetInfo*> by_id;
  for (const auto& s : pack.sheets) {
    const std::string where = "sheet " + std::to_string(s.sheet_id);
    if (s.sheet_id < 1 || s.sheet_id > kSheetCount) asset_fail(where, "sheet id out of range 1..8");
    if (!by_id.emplace(s.sheet_id, &s).second) asset_fail(where, "duplicate sheet id");
    const bool final_sheet = s.sheet_id == kFinalSheet;
    if (s.final_still != final_sheet) asset_fail(where, final_sheet ? "must be the final still" : "must not be final");
    const int expected = final_sheet ? 1 : kFramesPerSheet;
    if (s.frame_count != expected) {
      asset_fail(where, "has " + std::to_string(s.frame_count) + " frames, expected " + std::to_string(expected));
    }
    int cells_needed = 0;
    for (View v : kViews) {
      const auto it = s.view_offsets.find(v);
      if (it == s.view_offsets.end()) asset_fail(where + " view " + std::string(to_string(v)), "missing view block");
      if (it->second < 0) asset_fail(where + " view " + std::string(to_string(v)), "negative offset");
      cells_needed = std::max(cells_needed, it->second + s.frame_count);
    }
    const fs::path png = dir / s.file;
    if (!fs::exists(png)) asset_fail(where, "image " + s.file + " not found");
    const Image image = read_png(png);
    const int rows = (cells_needed + pack.columns - 1) / pack.columns;
    if (image.width < pack.columns * pack.cell_width || image.height < rows * pack.cell_height) {
      asset_fail(where, "image " + s.file + " is smaller than its cell layout");
    }
  }
  for (int id = 1; id <= kSheetCount; ++id) {
    if (!by_id.count(id)) asset_fail("sheet " + std::to_string(id), "missing from manifest");
  }
  if (pack.total_frames() != kTotalFrames) {
    asset_fail(manifest_path.string(),
               "frame total is " + std::to_string(pack.total_frames()) + ", expected " + std::to_string(kTotalFrames));
  }
  return pack;
}

std::array<FaceEntry, 4> face_views(const SheetInfo& sheet, int frame, const PyramidGeometry& geometry,
                                    bool quarter_turn) {
  const double correction = perspective_factor(geometry);
  auto local = [&](int face) {
    if (sheet.final_still) return 0;
    const int f = frame + (quarter_turn ? face * sheet.frame_count / 4 : 0);
    return ((f % sheet.frame_count) + sheet.frame_count) % sheet.frame_count;
  };
  auto reported = [&](int face) { return sheet.final_still ? kFinalFrame : local(face); };
  auto cell = [&](View v, int face) {
    const auto it = sheet.view_offsets.find(v);
    if (it == sheet.view_offsets.end()) {
      asset_fail("sheet " + std::to_string(sheet.sheet_id) + " view " + std::string(to_string(v)), "missing view block");
    }
    return it->second + local(face);
  };
  return {{
      {Face::Front, View::Front, cell(View::Front, 0), reported(0), false, correction},
      {Face::Right, View::LateralRight, cell(View::LateralRight, 1), reported(1), false, correction},
      {Face::Posterior, View::Posterior, cell(View::Posterior, 2), reported(2), false, correction},
      {Face::Left, View::LateralRight, cell(View::LateralRight, 3), reported(3), true, correction},
  }};
}

FrameSchedule make_schedule(const SpritePack& pack, int sheet_id, std::int64_t tick, const ScheduleParams& params) {
  const SheetInfo& sheet = pack.sheet(sheet_id);
  const int index = frame_index(tick, params.fps, params.rotation_period_ms);
  FrameSchedule s;
  s.tick = tick;
  s.sheet_id = sheet_id;
  s.fps = params.fps;
  s.faces = face_views(sheet, index, params.geometry, params.quarter_turn_faces);
  s.frame_index = sheet.final_still ? kFinalFrame : index;
  return s;
}

namespace {

// 3x5 digits, one row per entry, MSB = left column.
constexpr std::uint8_t kDigits[10][5] = {
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7},
};

using Rgba = std::array<std::uint8_t, 4>;

Rgba tint(View view) {
  switch (view) {
    case View::Front: return {230, 120, 100, 255};
    case View::LateralRight: return {110, 220, 130, 255};
    case View::Posterior: return {110, 150, 240, 255};
  }
  return {255, 255, 255, 255};
}

void put(Image& img, int x, int y, Rgba c) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  std::copy(c.begin(), c.end(), img.rgba.begin() + (static_cast<std::ptrdiff_t>(y) * img.width + x) * 4);
}

}  // namespace

Image render_placeholder_cell(int sheet_id, View view, int frame, int size) {
  Image img{size, size, std::vector<std::uint8_t>(static_cast<std::size_t>(size) * size * 4)};
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) put(img, x, y, {12, 12, 16, 255});

  const Rgba ink = tint(view);
  const int scale = std::max(1, size / 16);
  for (int row = 0; row < 5; ++row)
    for (int col = 0; col < 3; ++col)
      if (kDigits[sheet_id % 10][row] & (4 >> col))
        for (int dy = 0; dy < scale; ++dy)
          for (int dx = 0; dx < scale; ++dx) put(img, scale + col * scale + dx, scale + row * scale + dy, ink);

  const double c = (size - 1) / 2.0;
  const double radius = size * 0.4;
  if (frame == kFinalFrame) {
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        if (std::hypot(x - c, y - c) <= radius * 0.5) put(img, x, y, ink);
    return img;
  }
  const double a = tick_mark_angle_deg(frame) * std::numbers::pi / 180.0;
  const double ux = std::sin(a), uy = -std::cos(a);
  for (double r = 0; r <= radius; r += 0.25) {
    for (int w = -1; w <= 1; ++w) {
      put(img, static_cast<int>(std::lround(c + r * ux - w * uy)), static_cast<int>(std::lround(c + r * uy + w * ux)),
          {255, 255, 255, 255});
    }
  }
  return img;
}

Image render_placeholder_sheet(int sheet_id, int cell_size, int columns) {
  const bool final_sheet = sheet_id == kFinalSheet;
  const int frames = final_sheet ? 1 : kFramesPerSheet;
  const int cells = frames * static_cast<int>(kViews.size());
  const int rows = (cells + columns - 1) / columns;
  Image sheet{columns * cell_size, rows * cell_size,
              std::vector<std::uint8_t>(static_cast<std::size_t>(columns) * cell_size * rows * cell_size * 4)};
  for (std::size_t v = 0; v < kViews.size(); ++v) {
    for (int f = 0; f < frames; ++f) {
      const int index = static_cast<int>(v) * frames + f;
      const Image cell = render_placeholder_cell(sheet_id, kViews[v], final_sheet ? kFinalFrame : f, cell_size);
      const int ox = (index % columns) * cell_size, oy = (index / columns) * cell_size;
      for (int y = 0; y < cell_size; ++y) {
        std::copy_n(cell.rgba.begin() + static_cast<std::ptrdiff_t>(y) * cell_size * 4, cell_size * 4,
                    sheet.rgba.begin() + (static_cast<std::ptrdiff_t>(oy + y) * sheet.width + ox) * 4);
      }
    }
  }
  return sheet;
}

SpritePack generate_placeholder_pack(const fs::path& dir, int cell_size) {
  if (cell_size < 16) throw Error(ErrorCode::Validation, "must be at least 16", "cell_size");
  fs::create_directories(dir);
  SpritePack pack;
  pack.dir = dir;
  pack.cell_width = pack.cell_height = cell_size;
  for (int id = 1; id <= kSheetCount; ++id) {
    SheetInfo info;
    info.sheet_id = id;
    info.file = "sheet" + std::to_string(id) + ".png";
    info.final_still = id == kFinalSheet;
    info.frame_count = info.final_still ? 1 : kFramesPerSheet;
    for (std::size_t v = 0; v < kViews.size(); ++v) info.view_offsets[kViews[v]] = static_cast<int>(v) * info.frame_count;
    write_png(dir / info.file, render_placeholder_sheet(id, cell_size, pack.columns));
    pack.sheets.push_back(std::move(info));
  }
  std::ofstream(dir / "manifest.json") << manifest_json(pack).dump(2) << '\n';
  return load_sprite_pack(dir);
}

}  // namespace holomed::projection
