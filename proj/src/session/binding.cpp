#include "holomed/session/binding.hpp"

#include <string>

#include "holomed/error.hpp"

namespace holomed::session {

std::string_view to_string(Meaning meaning) {
  switch (meaning) {
    case Meaning::AnswerYes: return "AnswerYes";
    case Meaning::AnswerNo: return "AnswerNo";
    case Meaning::NextLesson: return "NextLesson";
    case Meaning::Hint: return "Hint";
    case Meaning::LogOff: return "LogOff";
  }
  return "AnswerYes";
}

Meaning meaning_from_string(std::string_view name) {
  for (auto m : {Meaning::AnswerYes, Meaning::AnswerNo, Meaning::NextLesson, Meaning::Hint, Meaning::LogOff}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::Validation, "unknown meaning '" + std::string(name) + "'");
}

GestureBinding::GestureBinding(Map map) : map_(std::move(map)) {
  std::map<Meaning, gesture::GestureKind> owner;
  for (const auto& [kind, meaning] : map_) {
    const std::string where = "bindings." + std::string(gesture::to_string(kind));
    if (kind == gesture::GestureKind::None) throw Error(ErrorCode::Validation, "None cannot be bound", where);
    auto [it, inserted] = owner.emplace(meaning, kind);
    if (!inserted) {
      throw Error(ErrorCode::Validation,
                  std::string(to_string(meaning)) + " is already bound to " + std::string(gesture::to_string(it->second)),
                  where);
    }
  }
  for (auto required : {Meaning::AnswerYes, Meaning::AnswerNo}) {
    if (!owner.count(required)) {
      throw Error(ErrorCode::Validation, std::string(to_string(required)) + " must be bound", "bindings");
    }
  }
}

GestureBinding GestureBinding::defaults() {
  using gesture::GestureKind;
  return GestureBinding({{GestureKind::SwipeRight, Meaning::AnswerYes},
                         {GestureKind::SwipeLeft, Meaning::AnswerNo},
                         {GestureKind::RaiseBoth, Meaning::Hint}});
}

std::optional<Meaning> GestureBinding::meaning_for(gesture::GestureKind kind) const {
  const auto it = map_.find(kind);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

}  // namespace holomed::session
