#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace holomed::protocol {

// Server monotonic milliseconds except t_capture, which is the source's
// clock and is never subtracted from server times.
struct LatencySample {
  std::uint64_t gesture_seq = 0;
  std::int64_t t_capture = 0;
  std::int64_t t_received = 0;
  std::int64_t t_evaluated = 0;
  std::int64_t t_broadcast = 0;
  int stage_index = 1;
  std::string session_id;
  std::string kind;

  std::int64_t gesture_to_render() const { return t_broadcast - t_received; }
  std::int64_t gesture_to_eval() const { return t_evaluated - t_received; }
  bool ordered() const { return t_received <= t_evaluated && t_evaluated <= t_broadcast; }

  friend bool operator==(const LatencySample&, const LatencySample&) = default;
};

nlohmann::json to_json(const LatencySample& sample);
LatencySample latency_sample_from_json(const nlohmann::json& j);

struct MetricStats {
  std::size_t count = 0;
  double avg = 0;
  std::int64_t min = 0;
  std::int64_t max = 0;

  friend bool operator==(const MetricStats&, const MetricStats&) = default;
};

// Mean / min / max of one metric; nullopt for an empty list.
std::optional<MetricStats> summarize(const std::vector<std::int64_t>& values);

struct LatencyRow {
  MetricStats gesture_to_render;
  MetricStats gesture_to_eval;
};

struct LatencyReport {
  std::optional<LatencyRow> overall;  // absent when there are no samples
  std::map<int, LatencyRow> per_stage;
};

LatencyReport measure_latency(const std::vector<LatencySample>& samples);
nlohmann::json to_json(const LatencyReport& report);

// Fixed-width table: one line per stage then the overall line.
std::string format_report(const LatencyReport& report);

}  // namespace holomed::protocol
