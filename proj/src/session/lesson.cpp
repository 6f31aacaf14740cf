#include "holomed/session/lesson.hpp"

#include <map>

namespace holomed::session {

const Stage* Lesson::stage(int index) const {
  for (const auto& s : stages)
    if (s.index == index) return &s;
  return nullptr;
}

std::vector<const Question*> Lesson::questions_for(int stage_index) const {
  std::vector<const Question*> out;
  for (const auto& q : questions)
    if (q.stage_index == stage_index) out.push_back(&q);
  return out;
}

const Question* Lesson::question(std::string_view id) const {
  for (const auto& q : questions)
    if (q.id == id) return &q;
  return nullptr;
}

const std::vector<Stage>& canonical_stages() {
  static const std::vector<Stage> stages{
      {1, "Floating head",
       "The fetal head floats above the pelvic inlet. Descent has not started yet.", 1},
      {2, "Descent and flexion",
       "The fetus moves down until the trunk meets resistance. The head flexes until the chin rests on the chest.",
       2},
      {3, "Engagement", "The fetal head settles into the maternal cervix.", 3},
      {4, "Internal rotation",
       "The fetus keeps descending obliquely through the pelvis and rotates on the way.", 4},
      {5, "Extension", "The head extends as it passes through the vulvar opening.", 5},
      {6, "Restitution and external rotation",
       "The body turns to line up the shoulders, repeating the earlier head movements.", 6},
      {7, "Shoulder delivery",
       "The fetus is almost out. The right shoulder emerges first, then the left, then the head follows.", 7},
      {8, "Expulsion", "The head leads, the shoulders follow, and the rest of the body is delivered.", 8},
  };
  return stages;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MissingStage: return "missing_stage";
    case ViolationKind::DuplicateStage: return "duplicate_stage";
    case ViolationKind::StageWithoutQuestions: return "stage_without_questions";
    case ViolationKind::DanglingStageReference: return "dangling_stage_reference";
    case ViolationKind::MissingFinalSheet: return "missing_final_sheet";
  }
  return "unknown";
}

std::vector<Violation> lesson_violations(const Lesson& lesson) {
  std::vector<Violation> out;
  std::map<int, int> seen;
  for (const auto& s : lesson.stages) ++seen[s.index];

  for (int i = 1; i <= kStageCount; ++i) {
    const auto it = seen.find(i);
    if (it == seen.end()) {
      out.push_back({ViolationKind::MissingStage, "stage " + std::to_string(i) + " is missing"});
    } else if (it->second > 1) {
      out.push_back({ViolationKind::DuplicateStage, "stage " + std::to_string(i) + " appears " +
                                                        std::to_string(it->second) + " times"});
    }
  }
  for (const auto& [index, count] : seen) {
    if (index < 1 || index > kStageCount) {
      out.push_back({ViolationKind::DanglingStageReference, "stage index " + std::to_string(index) + " is out of range"});
    }
  }
  for (int i = 1; i <= kStageCount; ++i) {
    if (seen.count(i) && lesson.questions_for(i).empty()) {
      out.push_back({ViolationKind::StageWithoutQuestions, "stage " + std::to_string(i) + " has no questions"});
    }
  }
  for (const auto& q : lesson.questions) {
    if (!seen.count(q.stage_index) || q.stage_index < 1 || q.stage_index > kStageCount) {
      out.push_back({ViolationKind::DanglingStageReference,
                     "question " + q.id + " references stage " + std::to_string(q.stage_index)});
    }
  }
  const Stage* last = lesson.stage(kStageCount);
  if (!last || last->sheet_id != kFinalSheetId) {
    out.push_back({ViolationKind::MissingFinalSheet,
                   "stage 8 must show sheet " + std::to_string(kFinalSheetId) + " (the final image)"});
  }
  return out;
}

}  // namespace holomed::session
