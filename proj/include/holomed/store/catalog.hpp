#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "holomed/session/session.hpp"
#include "holomed/store/document_store.hpp"

namespace holomed::store {

// Id of the gesture_bindings and hologram_options documents the server uses.
inline constexpr std::string_view kDefaultDocId = "default";

// Lesson document plus its questions, ordered by (order, id).
std::optional<session::Lesson> load_lesson(const DocumentStore& store, std::string_view lesson_id);

// Empty report means start_session will accept the lesson. Throws
// Error{NotFound} when the lesson does not exist.
std::vector<session::Violation> validate_lesson(const DocumentStore& store, std::string_view lesson_id);

// The "default" binding document, or GestureBinding::defaults() when absent.
session::GestureBinding active_binding(const DocumentStore& store);
HologramOptions active_hologram_options(const DocumentStore& store);

class StoreCatalog final : public session::LessonCatalog {
 public:
  explicit StoreCatalog(const DocumentStore& store) : store_(store) {}
  bool student_exists(std::string_view student_id) const override;
  std::optional<session::Lesson> find_lesson(std::string_view lesson_id) const override;

 private:
  const DocumentStore& store_;
};

// Loads {"<collection>": [{"id": ..., ...body}], ...} into the store,
// replacing documents with the same id. Returns the number written.
std::size_t import_documents(DocumentStore& store, const Json& seed);

}  // namespace holomed::store
