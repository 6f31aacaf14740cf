#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "holomed/gesture/classifier.hpp"
#include "holomed/session/binding.hpp"
#include "holomed/session/lesson.hpp"

namespace holomed::session {

using MonotonicMs = std::int64_t;

inline constexpr int kMaxCaptureFailures = 3;

enum class Phase { AwaitingStart, Presenting, AwaitingAnswer, Finished };

// CaptureRetry (a failed capture below the limit) and Rejected (unbound
// gesture, wrong phase) extend the evaluation outcomes so every request has
// a typed answer.
enum class Outcome {
  Correct,
  Incorrect,
  HintShown,
  Advanced,
  LessonSwitched,
  LoggedOff,
  CaptureError,
  CaptureRetry,
  Rejected,
};

std::string_view to_string(Phase phase);
Phase phase_from_string(std::string_view name);
std::string_view to_string(Outcome outcome);
Outcome outcome_from_string(std::string_view name);

struct LogEntry {
  MonotonicMs at_ms = 0;
  std::string event;
  std::string detail;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct SessionState {
  std::string session_id;
  std::string student_id;
  std::string lesson_id;
  int stage_index = 1;
  std::optional<std::string> current_question;
  int capture_failures = 0;
  int score = 0;
  Phase phase = Phase::AwaitingStart;
  // Finished through LogOff rather than by completing stage 8.
  bool logged_off = false;
  std::vector<LogEntry> log;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

struct Evaluation {
  Outcome outcome = Outcome::Rejected;
  std::string speak_text;
  int next_stage = 1;

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

// Read-only view of stored content the machine needs at start.
class LessonCatalog {
 public:
  virtual ~LessonCatalog() = default;
  virtual bool student_exists(std::string_view student_id) const = 0;
  virtual std::optional<Lesson> find_lesson(std::string_view lesson_id) const = 0;
};

// One student's lesson. Not thread-safe; callers serialise per session.
// Every operation takes the caller's monotonic time so replays are exact.
class Session {
 public:
  Session(Lesson lesson, SessionState state);

  const SessionState& state() const noexcept { return state_; }
  const Lesson& lesson() const noexcept { return lesson_; }

  // Presenting -> AwaitingAnswer, speaking the current question.
  Evaluation advance(MonotonicMs now);

  Evaluation submit_gesture(gesture::GestureKind kind, const GestureBinding& binding, MonotonicMs now);

  // nullopt while below the limit; CaptureError on the third consecutive
  // failure, after which the counter restarts.
  std::optional<Evaluation> record_capture_failure(MonotonicMs now);

  int stage_for_projection() const;

 private:
  Evaluation reject(std::string text, MonotonicMs now);
  Evaluation answer(bool said_yes, MonotonicMs now);
  void append(MonotonicMs now, std::string event, std::string detail);
  const Question* current() const;

  friend Session start_session(const LessonCatalog&, std::string_view, std::string_view, std::string, MonotonicMs);

  Lesson lesson_;
  SessionState state_;
};

// Throws Error{NotFound} for unknown ids and Error{Validation} when the
// lesson has structural violations.
Session start_session(const LessonCatalog& catalog, std::string_view student_id, std::string_view lesson_id,
                      std::string session_id, MonotonicMs now);

// "<monotonic_ms> <session_id> <event> <detail>" per log entry.
std::string export_log(const SessionState& state);

nlohmann::json to_json(const SessionState& state);
SessionState session_state_from_json(const nlohmann::json& j);

}  // namespace holomed::session
