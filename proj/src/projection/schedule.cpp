#include "holomed/projection/schedule.hpp"

#include <cmath>
#include <numbers>

#include "holomed/error.hpp"

namespace holomed::projection {

std::string_view to_string(Face face) {
  switch (face) {
    case Face::Front: return "Front";
    case Face::Right: return "Right";
    case Face::Posterior: return "Posterior";
    case Face::Left: return "Left";
  }
  return "Front";
}

std::string_view to_string(View view) {
  switch (view) {
    case View::Front: return "Front";
    case View::LateralRight: return "LateralRight";
    case View::Posterior: return "Posterior";
  }
  return "Front";
}

View view_from_string(std::string_view name) {
  for (auto v : kViews)
    if (to_string(v) == name) return v;
  throw Error(ErrorCode::Validation, "unknown view '" + std::string(name) + "'");
}

namespace {

Face face_from_string(std::string_view name) {
  for (auto f : kFaceOrder)
    if (to_string(f) == name) return f;
  throw Error(ErrorCode::Validation, "unknown face '" + std::string(name) + "'");
}

}  // namespace

void PyramidGeometry::validate() const {
  if (!(face_angle_deg > 40.0 && face_angle_deg < 50.0)) {
    throw Error(ErrorCode::Validation, "must be strictly between 40 and 50 degrees", "face_angle_deg");
  }
  if (!(monitor_diag_inches > 0)) throw Error(ErrorCode::Validation, "must be positive", "monitor_diag_inches");
}

double perspective_factor(const PyramidGeometry& geometry) {
  geometry.validate();
  const double tilt_deg = 2.0 * geometry.face_angle_deg - 90.0;
  return 1.0 / std::cos(tilt_deg * std::numbers::pi / 180.0);
}

int frame_index(std::int64_t tick, int fps, int rotation_period_ms) {
  if (fps < kMinFps || fps > kMaxFps) throw Error(ErrorCode::Validation, "must be in 25..30", "fps");
  if (rotation_period_ms < kMinRotationPeriodMs) {
    throw Error(ErrorCode::Validation, "must be at least 400", "rotation_period_ms");
  }
  if (tick < 0) throw Error(ErrorCode::Validation, "must not be negative", "tick");
  // tick < 2^63 / 40000 is ~7 million years at 30 fps.
  const std::int64_t steps = tick * 40000 / (static_cast<std::int64_t>(fps) * rotation_period_ms);
  return static_cast<int>(steps % kFramesPerSheet);
}

nlohmann::json to_json(const FrameSchedule& s) {
  auto frame = [](int index) { return index == kFinalFrame ? nlohmann::json("final") : nlohmann::json(index); };
  nlohmann::json faces = nlohmann::json::array();
  for (const auto& f : s.faces) {
    faces.push_back({{"face", to_string(f.face)},
                     {"view", to_string(f.view)},
                     {"cell", f.cell},
                     {"frame_index", frame(f.frame_index)},
                     {"mirrored", f.mirrored},
                     {"correction", f.correction}});
  }
  return {{"tick", s.tick}, {"sheet_id", s.sheet_id}, {"frame_index", frame(s.frame_index)}, {"fps", s.fps},
          {"faces", std::move(faces)}};
}

FrameSchedule frame_schedule_from_json(const nlohmann::json& j) {
  auto frame = [](const nlohmann::json& v) { return v.is_string() && v == "final" ? kFinalFrame : v.get<int>(); };
  FrameSchedule s;
  s.tick = j.at("tick").get<std::int64_t>();
  s.sheet_id = j.at("sheet_id").get<int>();
  s.frame_index = frame(j.at("frame_index"));
  s.fps = j.at("fps").get<int>();
  const auto& faces = j.at("faces");
  if (!faces.is_array() || faces.size() != 4) throw Error(ErrorCode::Validation, "must hold four entries", "faces");
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& f = faces[i];
    s.faces[i] = {face_from_string(f.at("face").get<std::string>()),
                  view_from_string(f.at("view").get<std::string>()),
                  f.at("cell").get<int>(),
                  frame(f.at("frame_index")),
                  f.at("mirrored").get<bool>(),
                  f.at("correction").get<double>()};
  }
  return s;
}

}  // namespace holomed::projection
