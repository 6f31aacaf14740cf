#pragma once

#include <map>
#include <optional>
#include <string_view>

#include "holomed/gesture/classifier.hpp"

namespace holomed::session {

enum class Meaning { AnswerYes, AnswerNo, NextLesson, Hint, LogOff };

std::string_view to_string(Meaning meaning);
Meaning meaning_from_string(std::string_view name);

// Gesture kind -> lesson meaning. Construction enforces injectivity and that
// both answers are reachable; GestureKind::None can never be bound.
class GestureBinding {
 public:
  using Map = std::map<gesture::GestureKind, Meaning>;

  // Throws Error{Validation} with the offending kind as where().
  explicit GestureBinding(Map map);

  // SwipeRight -> AnswerYes, SwipeLeft -> AnswerNo, RaiseBoth -> Hint.
  static GestureBinding defaults();

  std::optional<Meaning> meaning_for(gesture::GestureKind kind) const;
  const Map& map() const noexcept { return map_; }

  friend bool operator==(const GestureBinding&, const GestureBinding&) = default;

 private:
  Map map_;
};

}  // namespace holomed::session
