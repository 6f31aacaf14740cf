#include "holomed/server/replay.hpp"

#include <chrono>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "holomed/protocol/messages.hpp"
#include "holomed/server/service.hpp"

namespace holomed::server {

ReplaySummary replay(const std::vector<gesture::DepthFrame>& frames, const ReplayOptions& options) {
  ReplaySummary summary;
  gesture::GesturePipeline pipeline(options.pipeline);
  httplib::Client http(options.host, options.port);
  http.set_keep_alive(true);
  httplib::Headers headers;
  if (options.session_id) headers.emplace("X-Session-Id", *options.session_id);

  const auto start = std::chrono::steady_clock::now();
  const auto first_ts = frames.empty() ? 0 : frames.front().timestamp_ms;
  std::uint64_t seq = 0;
  for (const auto& frame : frames) {
    if (options.speed > 0) {
      const auto offset = std::chrono::duration<double, std::milli>((frame.timestamp_ms - first_ts) / options.speed);
      std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(offset));
    }
    const auto result = pipeline.process(frame);
    ++summary.frames;
    ++summary.statuses[std::string(gesture::to_string(result.status))];
    if (!result.event) continue;

    const auto& ev = *result.event;
    ++summary.events;
    ++summary.kinds[ev.capture_ok ? std::string(gesture::to_string(ev.kind)) : "CaptureFailure"];
    const protocol::GestureDetected g{ev.kind, static_cast<int>(ev.median_depth_mm), ev.status, ev.capture_ok};
    const auto body = protocol::encode({++seq, monotonic_ms(), g});
    const auto res = http.Post("/api/gestures", headers, body, "application/json");
    ++summary.http_statuses[res ? res->status : 0];
  }
  return summary;
}

std::string format_summary(const ReplaySummary& s) {
  std::string out = fmt::format("frames {}\nevents {}\n", s.frames, s.events);
  for (const auto& [k, n] : s.kinds) out += fmt::format("  kind {:<16} {}\n", k, n);
  for (const auto& [k, n] : s.statuses) out += fmt::format("  distance {:<12} {}\n", k, n);
  for (const auto& [code, n] : s.http_statuses) {
    out += fmt::format("  http {:<16} {}\n", code == 0 ? std::string("failed") : std::to_string(code), n);
  }
  return out;
}

}  // namespace holomed::server
