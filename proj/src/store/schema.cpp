#include "holomed/store/schema.hpp"

#include <set>

#include "holomed/error.hpp"
#include "holomed/session/session.hpp"

namespace holomed::store {

std::string_view to_string(Collection c) {
  switch (c) {
    case Collection::Students: return "students";
    case Collection::Teachers: return "teachers";
    case Collection::Lessons: return "lessons";
    case Collection::Questions: return "questions";
    case Collection::GestureBindings: return "gesture_bindings";
    case Collection::HologramOptions: return "hologram_options";
    case Collection::Sessions: return "sessions";
    case Collection::LatencySamples: return "latency_samples";
  }
  return "students";
}

Collection collection_from_string(std::string_view name) {
  for (auto c : kAllCollections)
    if (to_string(c) == name) return c;
  throw Error(ErrorCode::Validation, "unknown collection '" + std::string(name) + "'", "collection");
}

std::string canonical(const Json& value) {
  return value.dump(-1, ' ', false, Json::error_handler_t::strict);
}

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& message) {
  throw Error(ErrorCode::Validation, message, where);
}

std::string path(const std::string& prefix, std::string_view field) {
  return prefix.empty() ? std::string(field) : prefix + "." + std::string(field);
}

const Json* field(const Json& obj, std::string_view name, const std::string& prefix, bool required) {
  const auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) {
    if (required) invalid(path(prefix, name), "is required");
    return nullptr;
  }
  return &*it;
}

std::string text(const Json& obj, std::string_view name, const std::string& prefix = {}, bool required = true,
                 bool non_empty = true) {
  const Json* v = field(obj, name, prefix, required);
  if (!v) return {};
  if (!v->is_string()) invalid(path(prefix, name), "must be a string");
  auto s = v->get<std::string>();
  if (non_empty && s.empty()) invalid(path(prefix, name), "must not be empty");
  return s;
}

std::optional<std::int64_t> integer(const Json& obj, std::string_view name, const std::string& prefix = {},
                                    bool required = true) {
  const Json* v = field(obj, name, prefix, required);
  if (!v) return std::nullopt;
  if (!v->is_number_integer()) invalid(path(prefix, name), "must be an integer");
  return v->get<std::int64_t>();
}

std::optional<double> number(const Json& obj, std::string_view name, bool required = true) {
  const Json* v = field(obj, name, {}, required);
  if (!v) return std::nullopt;
  if (!v->is_number()) invalid(std::string(name), "must be a number");
  return v->get<double>();
}

bool boolean(const Json& obj, std::string_view name, const std::string& prefix = {}) {
  const Json* v = field(obj, name, prefix, true);
  if (!v->is_boolean()) invalid(path(prefix, name), "must be true or false");
  return v->get<bool>();
}

void only_known(Collection c, const Json& body) {
  const auto& known = known_fields(c);
  for (const auto& [key, value] : body.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) invalid(key, "unknown field");
  }
}

void validate_lesson_body(const Json& body) {
  text(body, "title");
  const Json* stages = field(body, "stages", {}, true);
  if (!stages->is_array()) invalid("stages", "must be an array");
  std::set<int> seen;
  for (std::size_t i = 0; i < stages->size(); ++i) {
    const std::string prefix = "stages[" + std::to_string(i) + "]";
    const auto& st = (*stages)[i];
    if (!st.is_object()) invalid(prefix, "must be an object");
    const auto index = *integer(st, "index", prefix);
    if (index < 1 || index > session::kStageCount) invalid(prefix + ".index", "must be in 1..8");
    if (!seen.insert(static_cast<int>(index)).second) invalid(prefix + ".index", "duplicate stage index");
    text(st, "name", prefix);
    text(st, "description", prefix, true, false);
    const auto sheet = *integer(st, "sheet_id", prefix);
    if (sheet < 1 || sheet > session::kFinalSheetId) invalid(prefix + ".sheet_id", "must be in 1..8");
  }
}

void validate_question_body(const Json& body) {
  text(body, "lesson_id");
  // Range against the lesson's stages is a lesson-level check (validate_lesson).
  if (*integer(body, "stage_index") < 1) invalid("stage_index", "must be at least 1");
  text(body, "prompt");
  boolean(body, "correct");
  text(body, "hint", {}, false, false);
  integer(body, "order", {}, false);
}

void validate_latency_body(const Json& body) {
  integer(body, "gesture_seq");
  integer(body, "t_capture");
  const auto rx = *integer(body, "t_received");
  const auto ev = *integer(body, "t_evaluated");
  const auto bc = *integer(body, "t_broadcast");
  if (ev < rx) invalid("t_evaluated", "earlier than t_received");
  if (bc < ev) invalid("t_broadcast", "earlier than t_evaluated");
  text(body, "session_id", {}, false);
  integer(body, "stage_index", {}, false);
  text(body, "kind", {}, false);
}

}  // namespace

const std::vector<std::string>& known_fields(Collection c) {
  static const std::vector<std::string> students{"name", "teacher_id"};
  static const std::vector<std::string> teachers{"name"};
  static const std::vector<std::string> lessons{"title", "stages"};
  static const std::vector<std::string> questions{"lesson_id", "stage_index", "prompt", "correct", "hint", "order"};
  static const std::vector<std::string> bindings{"bindings"};
  static const std::vector<std::string> options{"size_scale", "intensity", "angle_deg", "rotation_period_ms"};
  static const std::vector<std::string> sessions{"session_id", "student_id",       "lesson_id", "stage_index",
                                                 "current_question", "capture_failures", "score", "phase",
                                                 "logged_off", "log"};
  static const std::vector<std::string> latency{"gesture_seq", "t_capture",  "t_received", "t_evaluated",
                                                "t_broadcast", "session_id", "stage_index", "kind"};
  switch (c) {
    case Collection::Students: return students;
    case Collection::Teachers: return teachers;
    case Collection::Lessons: return lessons;
    case Collection::Questions: return questions;
    case Collection::GestureBindings: return bindings;
    case Collection::HologramOptions: return options;
    case Collection::Sessions: return sessions;
    case Collection::LatencySamples: return latency;
  }
  return students;
}

void validate_body(Collection c, const Json& body) {
  if (!body.is_object()) invalid("body", "must be a JSON object");
  only_known(c, body);
  switch (c) {
    case Collection::Students:
      text(body, "name");
      text(body, "teacher_id", {}, false);
      break;
    case Collection::Teachers: text(body, "name"); break;
    case Collection::Lessons: validate_lesson_body(body); break;
    case Collection::Questions: validate_question_body(body); break;
    case Collection::GestureBindings: binding_from_json(body); break;
    case Collection::HologramOptions: hologram_options_from_json(body); break;
    case Collection::Sessions: session::session_state_from_json(body); break;
    case Collection::LatencySamples: validate_latency_body(body); break;
  }
}

HologramOptions hologram_options_from_json(const Json& body) {
  HologramOptions o;
  if (auto v = number(body, "size_scale", false)) o.size_scale = *v;
  if (auto v = number(body, "intensity", false)) o.intensity = *v;
  if (auto v = number(body, "angle_deg", false)) o.angle_deg = *v;
  if (auto v = integer(body, "rotation_period_ms", {}, false)) {
    if (*v < 400 || *v > 3'600'000) invalid("rotation_period_ms", "must be in 400..3600000");
    o.rotation_period_ms = static_cast<int>(*v);
  }
  if (!(o.size_scale > 0)) invalid("size_scale", "must be positive");
  if (!(o.intensity >= 0 && o.intensity <= 1)) invalid("intensity", "must be in [0, 1]");
  if (!(o.angle_deg > 40 && o.angle_deg < 50)) invalid("angle_deg", "must be strictly between 40 and 50");
  return o;
}

Json to_json(const HologramOptions& o) {
  return {{"size_scale", o.size_scale},
          {"intensity", o.intensity},
          {"angle_deg", o.angle_deg},
          {"rotation_period_ms", o.rotation_period_ms}};
}

session::GestureBinding binding_from_json(const Json& body) {
  const Json* map = field(body, "bindings", {}, true);
  if (!map->is_object()) invalid("bindings", "must be an object of kind -> meaning");
  session::GestureBinding::Map out;
  for (const auto& [kind_name, meaning] : map->items()) {
    const std::string where = "bindings." + kind_name;
    gesture::GestureKind kind;
    try {
      kind = gesture::gesture_kind_from_string(kind_name);
    } catch (const Error&) {
      invalid(where, "unknown gesture kind");
    }
    if (!meaning.is_string()) invalid(where, "meaning must be a string");
    try {
      out[kind] = session::meaning_from_string(meaning.get<std::string>());
    } catch (const Error&) {
      invalid(where, "unknown meaning '" + meaning.get<std::string>() + "'");
    }
  }
  return session::GestureBinding(std::move(out));
}

Json to_json(const session::GestureBinding& binding) {
  Json map = Json::object();
  for (const auto& [kind, meaning] : binding.map()) map[std::string(gesture::to_string(kind))] = session::to_string(meaning);
  return {{"bindings", map}};
}

session::Stage stage_from_json(const Json& j) {
  return {j.at("index").get<int>(), j.at("name").get<std::string>(), j.value("description", std::string{}),
          j.at("sheet_id").get<int>()};
}

Json to_json(const session::Stage& s) {
  return {{"index", s.index}, {"name", s.name}, {"description", s.description}, {"sheet_id", s.sheet_id}};
}

session::Question question_from_json(std::string id, const Json& body) {
  return {std::move(id), body.at("stage_index").get<int>(), body.at("prompt").get<std::string>(),
          body.at("correct").get<bool>(), body.value("hint", std::string{})};
}

}  // namespace holomed::store
