#include "holomed/store/catalog.hpp"

#include <algorithm>

#include "holomed/error.hpp"

namespace holomed::store {

std::optional<session::Lesson> load_lesson(const DocumentStore& store, std::string_view lesson_id) {
  const auto doc = store.find(Collection::Lessons, lesson_id);
  if (!doc) return std::nullopt;

  session::Lesson lesson;
  lesson.id = doc->id;
  lesson.title = doc->body.at("title").get<std::string>();
  for (const auto& st : doc->body.at("stages")) lesson.stages.push_back(stage_from_json(st));

  auto questions = store.list(Collection::Questions, {{"lesson_id", lesson.id}});
  std::stable_sort(questions.begin(), questions.end(), [](const Document& a, const Document& b) {
    return a.body.value("order", std::int64_t{0}) < b.body.value("order", std::int64_t{0});
  });
  for (const auto& q : questions) lesson.questions.push_back(question_from_json(q.id, q.body));
  return lesson;
}

std::vector<session::Violation> validate_lesson(const DocumentStore& store, std::string_view lesson_id) {
  const auto lesson = load_lesson(store, lesson_id);
  if (!lesson) throw Error(ErrorCode::NotFound, "no lesson '" + std::string(lesson_id) + "'", "lesson_id");
  return session::lesson_violations(*lesson);
}

session::GestureBinding active_binding(const DocumentStore& store) {
  const auto doc = store.find(Collection::GestureBindings, kDefaultDocId);
  return doc ? binding_from_json(doc->body) : session::GestureBinding::defaults();
}

HologramOptions active_hologram_options(const DocumentStore& store) {
  const auto doc = store.find(Collection::HologramOptions, kDefaultDocId);
  return doc ? hologram_options_from_json(doc->body) : HologramOptions{};
}

bool StoreCatalog::student_exists(std::string_view student_id) const {
  return store_.find(Collection::Students, student_id).has_value();
}

std::optional<session::Lesson> StoreCatalog::find_lesson(std::string_view lesson_id) const {
  return load_lesson(store_, lesson_id);
}

std::size_t import_documents(DocumentStore& store, const Json& seed) {
  if (!seed.is_object()) throw Error(ErrorCode::Validation, "seed must be an object of collections", "seed");
  std::size_t written = 0;
  for (const auto& [name, docs] : seed.items()) {
    const Collection c = collection_from_string(name);
    if (!docs.is_array()) throw Error(ErrorCode::Validation, "must be an array", name);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      Json body = docs[i];
      if (!body.is_object()) throw Error(ErrorCode::Validation, "must be an object", name + "[" + std::to_string(i) + "]");
      std::optional<std::string> id;
      if (auto it = body.find("id"); it != body.end()) {
        id = it->get<std::string>();
        body.erase(it);
      }
      try {
        store.put(c, id, std::move(body));
      } catch (const Error& e) {
        throw Error(e.code(), e.what(), name + "[" + std::to_string(i) + "]");
      }
      ++written;
    }
  }
  return written;
}

}  // namespace holomed::store
