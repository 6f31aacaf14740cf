#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace holomed::session {

inline constexpr int kStageCount = 8;
inline constexpr int kFinalSheetId = 8;

struct Stage {
  int index = 1;  // 1..8
  std::string name;
  std::string description;  // spoken when the stage is presented
  int sheet_id = 1;
};

struct Question {
  std::string id;
  int stage_index = 1;
  std::string prompt;
  bool correct = true;
  std::string hint;
};

// A lesson as the session machine sees it: stages plus questions in
// authored order.
struct Lesson {
  std::string id;
  std::string title;
  std::vector<Stage> stages;
  std::vector<Question> questions;

  const Stage* stage(int index) const;
  std::vector<const Question*> questions_for(int stage_index) const;
  const Question* question(std::string_view id) const;
};

// The eight delivery-simulation stages, floating head through expulsion.
const std::vector<Stage>& canonical_stages();

enum class ViolationKind { MissingStage, DuplicateStage, StageWithoutQuestions, DanglingStageReference, MissingFinalSheet };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Empty result means a session can start on this lesson.
std::vector<Violation> lesson_violations(const Lesson& lesson);

}  // namespace holomed::session
