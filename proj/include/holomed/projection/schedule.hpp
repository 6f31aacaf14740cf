#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include <nlohmann/json.hpp>

namespace holomed::projection {

inline constexpr int kFramesPerSheet = 40;
inline constexpr int kAnimatedSheets = 7;
inline constexpr int kSheetCount = 8;
inline constexpr int kFinalSheet = 8;
inline constexpr int kTotalFrames = kAnimatedSheets * kFramesPerSheet + 1;  // 281
inline constexpr double kDegreesPerFrame = 360.0 / kFramesPerSheet;
inline constexpr int kFinalFrame = -1;  // frame_index of the final still

inline constexpr int kMinFps = 25;
inline constexpr int kMaxFps = 30;
inline constexpr int kDefaultRotationPeriodMs = 1600;
inline constexpr int kMinRotationPeriodMs = 400;

enum class Face { Front, Right, Posterior, Left };
enum class View { Front, LateralRight, Posterior };

inline constexpr std::array<Face, 4> kFaceOrder{Face::Front, Face::Right, Face::Posterior, Face::Left};
inline constexpr std::array<View, 3> kViews{View::Front, View::LateralRight, View::Posterior};

std::string_view to_string(Face face);
std::string_view to_string(View view);
View view_from_string(std::string_view name);

struct PyramidGeometry {
  double face_angle_deg = 47.0;
  double monitor_diag_inches = 21.0;

  // Throws Error{Validation} unless 40 < face_angle_deg < 50.
  void validate() const;
};

// 1 / cos(2θ − 90°): vertical stretch that cancels the foreshortening of a
// face tilted θ from the base. Exactly 1 at 45°.
double perspective_factor(const PyramidGeometry& geometry);

// floor(tick · 40000 / (fps · period)) mod 40. Throws Error{Validation} for
// fps outside [25, 30] or period below 400 ms.
int frame_index(std::int64_t tick, int fps, int rotation_period_ms);

struct FaceEntry {
  Face face = Face::Front;
  View view = View::Front;
  int cell = 0;  // cell index within the sheet image
  int frame_index = 0;
  bool mirrored = false;
  double correction = 1.0;

  friend bool operator==(const FaceEntry&, const FaceEntry&) = default;
};

struct FrameSchedule {
  std::int64_t tick = 0;
  int sheet_id = 1;
  int frame_index = 0;  // kFinalFrame on the final sheet
  int fps = kMinFps;
  std::array<FaceEntry, 4> faces{};

  bool is_final() const noexcept { return frame_index == kFinalFrame; }
  friend bool operator==(const FrameSchedule&, const FrameSchedule&) = default;
};

// frame_index is "final" for the final still.
nlohmann::json to_json(const FrameSchedule& schedule);
FrameSchedule frame_schedule_from_json(const nlohmann::json& j);

}  // namespace holomed::projection
