#include "holomed/protocol/messages.hpp"

#include "holomed/error.hpp"

namespace holomed::protocol {

using nlohmann::json;

std::string_view to_string(ClientRole role) {
  switch (role) {
    case ClientRole::GestureSource: return "GestureSource";
    case ClientRole::Projection: return "Projection";
    case ClientRole::Console: return "Console";
  }
  return "Console";
}

ClientRole client_role_from_string(std::string_view name) {
  for (auto r : {ClientRole::GestureSource, ClientRole::Projection, ClientRole::Console})
    if (to_string(r) == name) return r;
  throw Error(ErrorCode::Decode, "unknown role '" + std::string(name) + "'", "payload.role");
}

namespace {

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};

constexpr std::string_view kTypes[] = {"Hello",     "GestureDetected", "AnswerEvaluated", "ScheduleUpdate",
                                       "SpeakText", "ErrorNotice",     "Ping",            "Pong"};

[[noreturn]] void bad(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::Decode, message, "payload." + field);
}

const json& need(const json& p, const char* field) {
  const auto it = p.find(field);
  if (it == p.end()) bad(field, "is required");
  return *it;
}

std::string need_string(const json& p, const char* field) {
  const auto& v = need(p, field);
  if (!v.is_string()) bad(field, "must be a string");
  return v.get<std::string>();
}

std::int64_t need_int(const json& p, const char* field) {
  const auto& v = need(p, field);
  if (!v.is_number_integer()) bad(field, "must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t need_uint(const json& p, const char* field) {
  const auto& v = need(p, field);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    bad(field, "must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool need_bool(const json& p, const char* field) {
  const auto& v = need(p, field);
  if (!v.is_boolean()) bad(field, "must be true or false");
  return v.get<bool>();
}

template <class F>
auto parse_enum(const json& p, const char* field, F from_string) {
  const std::string name = need_string(p, field);
  try {
    return from_string(name);
  } catch (const Error&) {
    bad(field, "unknown value '" + name + "'");
  }
}

}  // namespace

std::string_view type_name(const Message& message) { return kTypes[message.index()]; }

json payload_json(const Message& message) {
  return std::visit(
      Overload{
          [](const Hello& m) {
            json j = {{"role", to_string(m.role)}};
            if (m.session_id) j["session_id"] = *m.session_id;
            return j;
          },
          [](const GestureDetected& m) -> json {
            return {{"kind", gesture::to_string(m.kind)},
                    {"median_depth_mm", m.median_depth_mm},
                    {"status", gesture::to_string(m.status)},
                    {"capture_ok", m.capture_ok}};
          },
          [](const AnswerEvaluated& m) -> json {
            return {{"outcome", session::to_string(m.outcome)},
                    {"speak_text", m.speak_text},
                    {"stage_index", m.stage_index},
                    {"session_id", m.session_id},
                    {"score", m.score}};
          },
          [](const ScheduleUpdate& m) { return projection::to_json(m.schedule); },
          [](const SpeakText& m) -> json { return {{"text", m.text}}; },
          [](const ErrorNotice& m) -> json { return {{"code", m.code}, {"text", m.text}}; },
          [](const Ping& m) -> json { return {{"nonce", m.nonce}}; },
          [](const Pong& m) -> json { return {{"nonce", m.nonce}, {"echo_ms", m.echo_ms}}; },
      },
      message);
}

Message message_from_json(std::string_view type, const json& p) {
  if (!p.is_object()) throw Error(ErrorCode::Decode, "must be an object", "payload");
  if (type == "Hello") {
    Hello m{parse_enum(p, "role", client_role_from_string), std::nullopt};
    if (auto it = p.find("session_id"); it != p.end() && !it->is_null()) m.session_id = need_string(p, "session_id");
    return m;
  }
  if (type == "GestureDetected") {
    const auto depth = need_int(p, "median_depth_mm");
    if (depth < 0 || depth > 65535) bad("median_depth_mm", "must be in 0..65535");
    return GestureDetected{parse_enum(p, "kind", gesture::gesture_kind_from_string), static_cast<int>(depth),
                           parse_enum(p, "status", gesture::distance_status_from_string), need_bool(p, "capture_ok")};
  }
  if (type == "AnswerEvaluated") {
    return AnswerEvaluated{parse_enum(p, "outcome", session::outcome_from_string), need_string(p, "speak_text"),
                           static_cast<int>(need_int(p, "stage_index")), p.value("session_id", std::string{}),
                           static_cast<int>(p.value("score", 0))};
  }
  if (type == "ScheduleUpdate") {
    try {
      return ScheduleUpdate{projection::frame_schedule_from_json(p)};
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Decode, e.what(), "payload");
    } catch (const Error& e) {
      throw Error(ErrorCode::Decode, e.what(), "payload");
    }
  }
  if (type == "SpeakText") return SpeakText{need_string(p, "text")};
  if (type == "ErrorNotice") return ErrorNotice{need_string(p, "code"), need_string(p, "text")};
  if (type == "Ping") return Ping{need_uint(p, "nonce")};
  if (type == "Pong") return Pong{need_uint(p, "nonce"), need_int(p, "echo_ms")};
  throw Error(ErrorCode::Decode, "unknown message type '" + std::string(type) + "'", "type");
}

std::string encode(const Envelope& e) {
  return json{{"type", e.type()}, {"seq", e.seq}, {"sent_ms", e.sent_ms}, {"payload", payload_json(e.payload)}}
      .dump(-1, ' ', false, json::error_handler_t::replace);
}

Envelope decode(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Decode, "malformed JSON", "byte " + std::to_string(e.byte));
  }
  if (!j.is_object()) throw Error(ErrorCode::Decode, "envelope must be an object", "byte 0");
  auto field = [&](const char* name) -> const json& {
    const auto it = j.find(name);
    if (it == j.end()) throw Error(ErrorCode::Decode, "is required", name);
    return *it;
  };
  const auto& type = field("type");
  if (!type.is_string()) throw Error(ErrorCode::Decode, "must be a string", "type");
  const auto& seq = field("seq");
  if (!seq.is_number_unsigned() || seq.get<std::uint64_t>() == 0) {
    throw Error(ErrorCode::Decode, "must be a positive integer", "seq");
  }
  const auto& sent = field("sent_ms");
  if (!sent.is_number_integer()) throw Error(ErrorCode::Decode, "must be an integer", "sent_ms");
  try {
    return Envelope{seq.get<std::uint64_t>(), sent.get<std::int64_t>(),
                    message_from_json(type.get<std::string>(), field("payload"))};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Decode, e.what(), "payload");
  }
}

bool accepted_from(ClientRole role, const Message& message) {
  return std::visit(Overload{
                        [](const Hello&) { return true; },
                        [](const Ping&) { return true; },
                        [](const Pong&) { return true; },
                        [&](const GestureDetected&) { return role == ClientRole::GestureSource; },
                        [](const auto&) { return false; },
                    },
                    message);
}

bool deliverable_to(ClientRole role, const Message& message) {
  if (std::holds_alternative<ScheduleUpdate>(message)) return role != ClientRole::GestureSource;
  return !std::holds_alternative<GestureDetected>(message) && !std::holds_alternative<Hello>(message);
}

}  // namespace holomed::protocol
