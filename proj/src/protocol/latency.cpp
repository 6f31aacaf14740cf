#include "holomed/protocol/latency.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace holomed::protocol {

nlohmann::json to_json(const LatencySample& s) {
  nlohmann::json j = {{"gesture_seq", s.gesture_seq}, {"t_capture", s.t_capture},     {"t_received", s.t_received},
                      {"t_evaluated", s.t_evaluated}, {"t_broadcast", s.t_broadcast}, {"stage_index", s.stage_index}};
  if (!s.session_id.empty()) j["session_id"] = s.session_id;
  if (!s.kind.empty()) j["kind"] = s.kind;
  return j;
}

LatencySample latency_sample_from_json(const nlohmann::json& j) {
  return {j.at("gesture_seq").get<std::uint64_t>(),
          j.at("t_capture").get<std::int64_t>(),
          j.at("t_received").get<std::int64_t>(),
          j.at("t_evaluated").get<std::int64_t>(),
          j.at("t_broadcast").get<std::int64_t>(),
          j.value("stage_index", 1),
          j.value("session_id", std::string{}),
          j.value("kind", std::string{})};
}

std::optional<MetricStats> summarize(const std::vector<std::int64_t>& values) {
  if (values.empty()) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return MetricStats{values.size(), sum / static_cast<double>(values.size()), *lo, *hi};
}

namespace {

LatencyRow row_of(const std::vector<const LatencySample*>& samples) {
  std::vector<std::int64_t> render, eval;
  for (const auto* s : samples) {
    render.push_back(s->gesture_to_render());
    eval.push_back(s->gesture_to_eval());
  }
  return {*summarize(render), *summarize(eval)};
}

nlohmann::json stats_json(const MetricStats& m) {
  return {{"count", m.count}, {"avg", m.avg}, {"min", m.min}, {"max", m.max}};
}

nlohmann::json row_json(const LatencyRow& r) {
  return {{"gesture_to_render", stats_json(r.gesture_to_render)}, {"gesture_to_eval", stats_json(r.gesture_to_eval)}};
}

}  // namespace

LatencyReport measure_latency(const std::vector<LatencySample>& samples) {
  LatencyReport report;
  if (samples.empty()) return report;
  std::vector<const LatencySample*> all;
  std::map<int, std::vector<const LatencySample*>> by_stage;
  for (const auto& s : samples) {
    all.push_back(&s);
    by_stage[s.stage_index].push_back(&s);
  }
  report.overall = row_of(all);
  for (const auto& [stage, list] : by_stage) report.per_stage[stage] = row_of(list);
  return report;
}

nlohmann::json to_json(const LatencyReport& report) {
  nlohmann::json stages = nlohmann::json::object();
  for (const auto& [stage, row] : report.per_stage) stages[std::to_string(stage)] = row_json(row);
  return {{"overall", report.overall ? row_json(*report.overall) : nlohmann::json(nullptr)}, {"per_stage", stages}};
}

std::string format_report(const LatencyReport& report) {
  if (!report.overall) return "no latency samples\n";
  std::string out = fmt::format("{:<8} {:>6} {:>10} {:>8} {:>8} {:>10} {:>8} {:>8}\n", "stage", "count", "render_avg",
                                "min", "max", "eval_avg", "min", "max");
  auto line = [&](const std::string& label, const LatencyRow& r) {
    out += fmt::format("{:<8} {:>6} {:>10.2f} {:>8} {:>8} {:>10.2f} {:>8} {:>8}\n", label, r.gesture_to_render.count,
                       r.gesture_to_render.avg, r.gesture_to_render.min, r.gesture_to_render.max,
                       r.gesture_to_eval.avg, r.gesture_to_eval.min, r.gesture_to_eval.max);
  };
  for (const auto& [stage, row] : report.per_stage) line(std::to_string(stage), row);
  line("overall", *report.overall);
  return out;
}

}  // namespace holomed::protocol
