#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holomed/gesture/depth.hpp"
#include "holomed/gesture/pipeline.hpp"

namespace holomed::server {

struct ReplayOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  double speed = 1.0;  // 0 replays without pauses
  std::optional<std::string> session_id;
  gesture::PipelineConfig pipeline;
};

struct ReplaySummary {
  std::size_t frames = 0;
  std::size_t events = 0;
  std::map<std::string, std::size_t> kinds;     // by gesture kind, capture failures as "CaptureFailure"
  std::map<std::string, std::size_t> statuses;  // by distance status, every frame
  std::map<int, std::size_t> http_statuses;     // 0 = request failed
};

// Gesture source role: runs the pipeline over recorded frames, pacing by
// frame timestamps, and POSTs each event to /api/gestures.
ReplaySummary replay(const std::vector<gesture::DepthFrame>& frames, const ReplayOptions& options);

std::string format_summary(const ReplaySummary& summary);

}  // namespace holomed::server
