#include "holomed/gesture/pipeline.hpp"

#include "holomed/error.hpp"
#include "holomed/gesture/contour.hpp"

namespace holomed::gesture {

GesturePipeline::GesturePipeline(PipelineConfig config)
    : config_(config), track_(config.track_capacity) {
  config_.gate.validate();
  if (config_.window_ms <= 0) throw Error(ErrorCode::Validation, "window must be positive", "window_ms");
}

FrameResult GesturePipeline::process(const DepthFrame& frame) {
  frame.validate();
  if (last_timestamp_ && frame.timestamp_ms <= *last_timestamp_) {
    throw Error(ErrorCode::InvalidInput, "frame timestamps must strictly increase");
  }
  last_timestamp_ = frame.timestamp_ms;

  const auto mask = segment_user(frame, config_.gate);
  FrameResult result;
  result.status = distance_status(mask, config_.gate);
  result.median_depth_mm = mask.median_depth_mm;
  result.pixel_count = mask.pixel_count;

  if (result.status == DistanceStatus::InBand) {
    out_of_band_since_.reset();
    result.hands = locate_hands(trace_contour(mask), mask, frame.timestamp_ms);
    track_.push(result.hands);
    const double threshold =
        config_.threshold_px > 0.0 ? config_.threshold_px : default_threshold_px(frame.width);
    const auto kind = classify_gesture(track_, threshold, config_.window_ms);
    if (kind != GestureKind::None) {
      result.event = GestureEvent{frame.timestamp_ms, kind, mask.median_depth_mm, result.status, true};
    }
    return result;
  }

  result.hands.timestamp_ms = frame.timestamp_ms;
  track_.push(result.hands);
  if (result.status == DistanceStatus::OutOfGate) {
    out_of_band_since_.reset();
    return result;
  }
  if (!out_of_band_since_) out_of_band_since_ = frame.timestamp_ms;
  if (frame.timestamp_ms - *out_of_band_since_ >= config_.capture_failure_ms) {
    result.event = GestureEvent{frame.timestamp_ms, GestureKind::None, mask.median_depth_mm, result.status, false};
    out_of_band_since_ = frame.timestamp_ms;
  }
  return result;
}

}  // namespace holomed::gesture
