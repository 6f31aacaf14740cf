#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "holomed/gesture/classifier.hpp"
#include "holomed/gesture/depth.hpp"
#include "holomed/projection/schedule.hpp"
#include "holomed/session/session.hpp"

namespace holomed::protocol {

enum class ClientRole { GestureSource, Projection, Console };

std::string_view to_string(ClientRole role);
ClientRole client_role_from_string(std::string_view name);

struct Hello {
  ClientRole role = ClientRole::Console;
  std::optional<std::string> session_id;
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct GestureDetected {
  gesture::GestureKind kind = gesture::GestureKind::None;
  int median_depth_mm = 0;
  gesture::DistanceStatus status = gesture::DistanceStatus::OutOfGate;
  bool capture_ok = true;
  friend bool operator==(const GestureDetected&, const GestureDetected&) = default;
};

// session_id and score ride along so a console can follow several sessions.
struct AnswerEvaluated {
  session::Outcome outcome = session::Outcome::Rejected;
  std::string speak_text;
  int stage_index = 1;
  std::string session_id;
  int score = 0;
  friend bool operator==(const AnswerEvaluated&, const AnswerEvaluated&) = default;
};

struct ScheduleUpdate {
  projection::FrameSchedule schedule;
  friend bool operator==(const ScheduleUpdate&, const ScheduleUpdate&) = default;
};

struct SpeakText {
  std::string text;
  friend bool operator==(const SpeakText&, const SpeakText&) = default;
};

struct ErrorNotice {
  std::string code;
  std::string text;
  friend bool operator==(const ErrorNotice&, const ErrorNotice&) = default;
};

struct Ping {
  std::uint64_t nonce = 0;
  friend bool operator==(const Ping&, const Ping&) = default;
};

struct Pong {
  std::uint64_t nonce = 0;
  std::int64_t echo_ms = 0;
  friend bool operator==(const Pong&, const Pong&) = default;
};

using Message = std::variant<Hello, GestureDetected, AnswerEvaluated, ScheduleUpdate, SpeakText, ErrorNotice, Ping, Pong>;

std::string_view type_name(const Message& message);

struct Envelope {
  std::uint64_t seq = 1;
  std::int64_t sent_ms = 0;
  Message payload;

  std::string_view type() const { return type_name(payload); }
  friend bool operator==(const Envelope&, const Envelope&) = default;
};

// Payload object only, without the envelope fields.
nlohmann::json payload_json(const Message& message);
// Throws Error{Decode} with a "payload.<field>" path.
Message message_from_json(std::string_view type, const nlohmann::json& payload);

// One UTF-8 JSON text: {"type", "seq", "sent_ms", "payload"}.
std::string encode(const Envelope& envelope);
// Unknown fields are ignored; unknown types, bad JSON and bad fields throw
// Error{Decode}. JSON syntax errors name the byte offset ("byte N").
Envelope decode(std::string_view bytes);

// Client-to-server direction rules: GestureDetected only from a gesture
// source; server-only messages are never accepted from a client.
bool accepted_from(ClientRole role, const Message& message);
// Server-to-client: ScheduleUpdate only reaches projections and consoles.
bool deliverable_to(ClientRole role, const Message& message);

}  // namespace holomed::protocol
