#pragma once

#include <optional>

#include "holomed/gesture/classifier.hpp"
#include "holomed/gesture/depth.hpp"
#include "holomed/gesture/hands.hpp"

namespace holomed::gesture {

struct PipelineConfig {
  GateConfig gate;
  // <= 0 selects 25% of the frame width.
  double threshold_px = 0.0;
  TimestampMs window_ms = kDefaultWindowMs;
  std::size_t track_capacity = 32;
  // A user present in the gate but outside the band for this long counts as
  // one failed capture attempt; the timer restarts after each report.
  TimestampMs capture_failure_ms = kDefaultWindowMs;
};

struct GestureEvent {
  TimestampMs timestamp_ms = 0;
  GestureKind kind = GestureKind::None;
  Millimeters median_depth_mm = 0;
  DistanceStatus status = DistanceStatus::OutOfGate;
  bool capture_ok = true;
};

struct FrameResult {
  DistanceStatus status = DistanceStatus::OutOfGate;
  Millimeters median_depth_mm = 0;
  std::size_t pixel_count = 0;
  HandObservation hands;
  std::optional<GestureEvent> event;
};

// One instance per depth stream. Only in-band frames feed the hand track;
// anything else breaks the track so no motion is smoothed across a gap.
class GesturePipeline {
 public:
  explicit GesturePipeline(PipelineConfig config = {});

  FrameResult process(const DepthFrame& frame);

  const PipelineConfig& config() const noexcept { return config_; }
  const HandTrack& track() const noexcept { return track_; }

 private:
  PipelineConfig config_;
  HandTrack track_;
  std::optional<TimestampMs> last_timestamp_;
  std::optional<TimestampMs> out_of_band_since_;
};

}  // namespace holomed::gesture
