#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holomed/store/schema.hpp"

namespace holomed::store {

struct Document {
  std::string id;
  Collection collection = Collection::Students;
  Json body;
  std::uint64_t revision = 0;

  friend bool operator==(const Document&, const Document&) = default;
};

// {"id", "collection", "revision", "body"}
Json to_json(const Document& doc);

// Ids are 1..64 chars of [A-Za-z0-9_-]; generated ids are 16 hex digits.
bool valid_id(std::string_view id);

// Append-only journal per collection, compacted into a snapshot on close.
//
// Layout: <root>/<collection>/snapshot.json and journal.ndjson. Each journal
// line is a complete write record and is fdatasync'd before put/remove
// return. One writer per collection at a time; readers copy a shared
// snapshot pointer and never wait for a write's fsync.
class DocumentStore {
 public:
  // Opens (creating if needed) and replays every collection. A torn last
  // journal line from a crash is discarded; any other damage throws
  // Error{Parse}.
  explicit DocumentStore(std::filesystem::path root);
  ~DocumentStore();

  DocumentStore(const DocumentStore&) = delete;
  DocumentStore& operator=(const DocumentStore&) = delete;

  // Insert (id generated when absent) or replace. With expected_revision the
  // write only succeeds if the current revision matches (0 = must not
  // exist), otherwise Error{Conflict}.
  Document put(Collection c, std::optional<std::string> id, Json body,
               std::optional<std::uint64_t> expected_revision = std::nullopt);

  // Throws Error{NotFound}.
  Document get(Collection c, std::string_view id) const;
  std::optional<Document> find(Collection c, std::string_view id) const;

  // Id order. Filter keys must be known fields of the collection; values
  // match top-level fields exactly.
  std::vector<Document> list(Collection c, const Json& filter = Json::object()) const;
  std::size_t count(Collection c) const;

  // Idempotent; returns whether a document was removed.
  bool remove(Collection c, std::string_view id);

  void compact(Collection c);
  // Compacts every collection and releases the journals. Further writes throw.
  void close();

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  struct Shelf;
  Shelf& shelf(Collection c) const;

  std::filesystem::path root_;
  std::array<std::unique_ptr<Shelf>, std::size(kAllCollections)> shelves_;
};

}  // namespace holomed::store
