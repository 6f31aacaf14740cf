#include "holomed/session/session.hpp"

#include <algorithm>
#include <sstream>

#include "holomed/error.hpp"

namespace holomed::session {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::AwaitingStart: return "AwaitingStart";
    case Phase::Presenting: return "Presenting";
    case Phase::AwaitingAnswer: return "AwaitingAnswer";
    case Phase::Finished: return "Finished";
  }
  return "AwaitingStart";
}

Phase phase_from_string(std::string_view name) {
  for (auto p : {Phase::AwaitingStart, Phase::Presenting, Phase::AwaitingAnswer, Phase::Finished}) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::Validation, "unknown phase '" + std::string(name) + "'");
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Correct: return "Correct";
    case Outcome::Incorrect: return "Incorrect";
    case Outcome::HintShown: return "HintShown";
    case Outcome::Advanced: return "Advanced";
    case Outcome::LessonSwitched: return "LessonSwitched";
    case Outcome::LoggedOff: return "LoggedOff";
    case Outcome::CaptureError: return "CaptureError";
    case Outcome::CaptureRetry: return "CaptureRetry";
    case Outcome::Rejected: return "Rejected";
  }
  return "Rejected";
}

Outcome outcome_from_string(std::string_view name) {
  for (auto o : {Outcome::Correct, Outcome::Incorrect, Outcome::HintShown, Outcome::Advanced, Outcome::LessonSwitched,
                 Outcome::LoggedOff, Outcome::CaptureError, Outcome::CaptureRetry, Outcome::Rejected}) {
    if (to_string(o) == name) return o;
  }
  throw Error(ErrorCode::Validation, "unknown outcome '" + std::string(name) + "'");
}

namespace {

std::string stage_intro(const Lesson& lesson, int index) {
  const Stage* s = lesson.stage(index);
  if (!s) return "Stage " + std::to_string(index) + ".";
  return "Stage " + std::to_string(index) + ": " + s->name + ". " + s->description;
}

}  // namespace

Session::Session(Lesson lesson, SessionState state) : lesson_(std::move(lesson)), state_(std::move(state)) {}

void Session::append(MonotonicMs now, std::string event, std::string detail) {
  std::replace(detail.begin(), detail.end(), '\n', ' ');
  state_.log.push_back({now, std::move(event), std::move(detail)});
}

const Question* Session::current() const {
  return state_.current_question ? lesson_.question(*state_.current_question) : nullptr;
}

Evaluation Session::reject(std::string text, MonotonicMs now) {
  append(now, "rejected", text);
  return {Outcome::Rejected, std::move(text), state_.stage_index};
}

Evaluation Session::advance(MonotonicMs now) {
  if (state_.phase != Phase::Presenting) {
    return reject("Nothing to advance while " + std::string(to_string(state_.phase)) + ".", now);
  }
  const Question* q = current();
  if (!q) return reject("This stage has no question to ask.", now);
  state_.phase = Phase::AwaitingAnswer;
  append(now, "advance", "question=" + q->id);
  return {Outcome::Advanced, q->prompt, state_.stage_index};
}

Evaluation Session::answer(bool said_yes, MonotonicMs now) {
  const Question* q = current();
  if (!q) return reject("There is no open question.", now);
  const std::string given = said_yes ? "yes" : "no";
  if (said_yes != q->correct) {
    append(now, "incorrect", "question=" + q->id + " answer=" + given);
    return {Outcome::Incorrect, "That is not right. Try again: " + q->prompt, state_.stage_index};
  }

  ++state_.score;
  append(now, "correct", "question=" + q->id + " answer=" + given);

  const auto stage_questions = lesson_.questions_for(state_.stage_index);
  const auto pos = std::find(stage_questions.begin(), stage_questions.end(), q);
  if (pos != stage_questions.end() && std::next(pos) != stage_questions.end()) {
    state_.current_question = (*std::next(pos))->id;
    return {Outcome::Correct, "Correct. " + (*std::next(pos))->prompt, state_.stage_index};
  }
  if (state_.stage_index < kStageCount) {
    ++state_.stage_index;
    const auto next_questions = lesson_.questions_for(state_.stage_index);
    state_.current_question = next_questions.empty() ? std::nullopt : std::optional(next_questions.front()->id);
    state_.phase = Phase::Presenting;
    append(now, "stage", "stage=" + std::to_string(state_.stage_index));
    return {Outcome::Correct, "Correct. " + stage_intro(lesson_, state_.stage_index), state_.stage_index};
  }
  state_.current_question.reset();
  state_.phase = Phase::Finished;
  append(now, "finished", "score=" + std::to_string(state_.score));
  return {Outcome::Correct, "Correct. The lesson is complete. Final score " + std::to_string(state_.score) + ".",
          state_.stage_index};
}

Evaluation Session::submit_gesture(gesture::GestureKind kind, const GestureBinding& binding, MonotonicMs now) {
  if (kind != gesture::GestureKind::None) state_.capture_failures = 0;
  if (state_.phase == Phase::Finished) return reject("This lesson has already finished.", now);

  const auto meaning = binding.meaning_for(kind);
  if (!meaning) {
    return reject("The gesture " + std::string(gesture::to_string(kind)) + " has no meaning in this lesson.", now);
  }

  switch (*meaning) {
    case Meaning::AnswerYes:
    case Meaning::AnswerNo:
      if (state_.phase != Phase::AwaitingAnswer) {
        return reject("Please wait for the question before answering.", now);
      }
      return answer(*meaning == Meaning::AnswerYes, now);

    case Meaning::Hint: {
      const Question* q = current();
      std::string text;
      if (state_.phase == Phase::AwaitingAnswer && q) {
        text = q->hint.empty() ? "There is no hint for this question. " + q->prompt : q->hint;
      } else {
        text = stage_intro(lesson_, state_.stage_index);
      }
      append(now, "hint", q ? "question=" + q->id : "stage=" + std::to_string(state_.stage_index));
      return {Outcome::HintShown, std::move(text), state_.stage_index};
    }

    case Meaning::LogOff:
      state_.phase = Phase::Finished;
      state_.logged_off = true;
      state_.current_question.reset();
      append(now, "logoff", "score=" + std::to_string(state_.score));
      return {Outcome::LoggedOff, "Goodbye. Your score is " + std::to_string(state_.score) + ".", state_.stage_index};

    case Meaning::NextLesson:
      append(now, "lesson_switched", "from=" + state_.lesson_id);
      return {Outcome::LessonSwitched, "Switching to the next lesson.", state_.stage_index};
  }
  return reject("Unhandled gesture.", now);
}

std::optional<Evaluation> Session::record_capture_failure(MonotonicMs now) {
  if (state_.phase == Phase::Finished) return reject("This lesson has already finished.", now);
  ++state_.capture_failures;
  append(now, "capture_failure", "attempt=" + std::to_string(state_.capture_failures));
  if (state_.capture_failures < kMaxCaptureFailures) return std::nullopt;
  state_.capture_failures = 0;
  append(now, "capture_error", "attempts=" + std::to_string(kMaxCaptureFailures));
  return Evaluation{Outcome::CaptureError,
                    "I could not see your gesture. Please stand between 70 and 80 centimeters from the sensor and try "
                    "again.",
                    state_.stage_index};
}

int Session::stage_for_projection() const {
  if (state_.phase == Phase::Finished) return kFinalSheetId;
  const Stage* s = lesson_.stage(state_.stage_index);
  return s ? s->sheet_id : state_.stage_index;
}

Session start_session(const LessonCatalog& catalog, std::string_view student_id, std::string_view lesson_id,
                      std::string session_id, MonotonicMs now) {
  if (!catalog.student_exists(student_id)) {
    throw Error(ErrorCode::NotFound, "unknown student '" + std::string(student_id) + "'", "student_id");
  }
  auto lesson = catalog.find_lesson(lesson_id);
  if (!lesson) throw Error(ErrorCode::NotFound, "unknown lesson '" + std::string(lesson_id) + "'", "lesson_id");
  const auto problems = lesson_violations(*lesson);
  if (!problems.empty()) {
    std::string text;
    for (const auto& v : problems) text += (text.empty() ? "" : "; ") + v.detail;
    throw Error(ErrorCode::Validation, text, "lesson_id");
  }

  SessionState state;
  state.session_id = std::move(session_id);
  state.student_id = std::string(student_id);
  state.lesson_id = std::string(lesson_id);
  state.stage_index = 1;
  state.phase = Phase::Presenting;
  state.current_question = lesson->questions_for(1).front()->id;
  Session session(std::move(*lesson), std::move(state));
  session.state_.log.push_back({now, "start", "student=" + session.state_.student_id + " lesson=" +
                                                  session.state_.lesson_id});
  return session;
}

std::string export_log(const SessionState& state) {
  std::ostringstream out;
  for (const auto& e : state.log) out << e.at_ms << ' ' << state.session_id << ' ' << e.event << ' ' << e.detail << '\n';
  return out.str();
}

nlohmann::json to_json(const SessionState& s) {
  nlohmann::json log = nlohmann::json::array();
  for (const auto& e : s.log) log.push_back({{"at_ms", e.at_ms}, {"event", e.event}, {"detail", e.detail}});
  return {
      {"session_id", s.session_id},
      {"student_id", s.student_id},
      {"lesson_id", s.lesson_id},
      {"stage_index", s.stage_index},
      {"current_question", s.current_question ? nlohmann::json(*s.current_question) : nlohmann::json(nullptr)},
      {"capture_failures", s.capture_failures},
      {"score", s.score},
      {"phase", to_string(s.phase)},
      {"logged_off", s.logged_off},
      {"log", std::move(log)},
  };
}

SessionState session_state_from_json(const nlohmann::json& j) {
  try {
    SessionState s;
    s.session_id = j.at("session_id").get<std::string>();
    s.student_id = j.at("student_id").get<std::string>();
    s.lesson_id = j.at("lesson_id").get<std::string>();
    s.stage_index = j.at("stage_index").get<int>();
    if (!j.at("current_question").is_null()) s.current_question = j.at("current_question").get<std::string>();
    s.capture_failures = j.at("capture_failures").get<int>();
    s.score = j.at("score").get<int>();
    s.phase = phase_from_string(j.at("phase").get<std::string>());
    s.logged_off = j.value("logged_off", false);
    for (const auto& e : j.at("log")) {
      s.log.push_back({e.at("at_ms").get<MonotonicMs>(), e.at("event").get<std::string>(),
                       e.at("detail").get<std::string>()});
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Validation, std::string("malformed session state: ") + e.what(), "sessions");
  }
}

}  // namespace holomed::session
