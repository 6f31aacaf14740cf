#include "holomed/store/document_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "holomed/error.hpp"
#include "holomed/ids.hpp"

namespace holomed::store {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kCompactAfterLines = 4096;

using DocMap = std::map<std::string, std::shared_ptr<const Document>, std::less<>>;

[[noreturn]] void io_fail(const std::string& what, const fs::path& p) {
  throw Error(ErrorCode::Io, what + ": " + std::strerror(errno), p.string());
}

void write_all(int fd, std::string_view data, const fs::path& p) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write failed", p);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void sync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) io_fail("open directory failed", dir);
  ::fsync(fd);
  ::close(fd);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) io_fail("cannot read", p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Json to_json(const Document& d) {
  return {{"id", d.id}, {"collection", to_string(d.collection)}, {"revision", d.revision}, {"body", d.body}};
}

bool valid_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
                    ch == '-';
    if (!ok) return false;
  }
  return true;
}

struct DocumentStore::Shelf {
  Collection collection;
  fs::path dir;

  std::mutex write_mu;
  int journal_fd = -1;
  std::size_t journal_lines = 0;

  mutable std::mutex view_mu;
  std::shared_ptr<const DocMap> view = std::make_shared<DocMap>();

  fs::path journal_path() const { return dir / "journal.ndjson"; }
  fs::path snapshot_path() const { return dir / "snapshot.json"; }

  std::shared_ptr<const DocMap> current() const {
    std::lock_guard lock(view_mu);
    return view;
  }
  void publish(std::shared_ptr<const DocMap> next) {
    std::lock_guard lock(view_mu);
    view = std::move(next);
  }

  void apply(DocMap& map, const Json& record, const std::string& where) const {
    try {
      const auto op = record.at("op").get<std::string>();
      auto id = record.at("id").get<std::string>();
      if (op == "put") {
        auto doc = std::make_shared<Document>();
        doc->id = id;
        doc->collection = collection;
        doc->revision = record.at("revision").get<std::uint64_t>();
        doc->body = record.at("body");
        map[std::move(id)] = std::move(doc);
      } else if (op == "delete") {
        map.erase(id);
      } else {
        throw Error(ErrorCode::Parse, "unknown op '" + op + "'", where);
      }
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::Parse, e.what(), where);
    }
  }

  void load() {
    fs::create_directories(dir);
    DocMap map;
    if (fs::exists(snapshot_path())) {
      Json snap;
      try {
        snap = Json::parse(read_file(snapshot_path()));
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::Parse, e.what(), snapshot_path().string());
      }
      for (const auto& doc : snap.value("documents", Json::array())) {
        Json record = doc;
        record["op"] = "put";
        apply(map, record, snapshot_path().string());
      }
    }

    std::size_t good_bytes = 0;
    if (fs::exists(journal_path())) {
      const std::string data = read_file(journal_path());
      std::size_t pos = 0, line_no = 0;
      while (pos < data.size()) {
        const auto nl = data.find('\n', pos);
        if (nl == std::string::npos) break;  // torn tail from an interrupted append
        ++line_no;
        const std::string where = journal_path().string() + " line " + std::to_string(line_no);
        Json record;
        try {
          record = Json::parse(std::string_view(data).substr(pos, nl - pos));
        } catch (const Json::exception& e) {
          throw Error(ErrorCode::Parse, e.what(), where);
        }
        apply(map, record, where);
        pos = nl + 1;
        good_bytes = pos;
        journal_lines = line_no;
      }
    }

    journal_fd = ::open(journal_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (journal_fd < 0) io_fail("cannot open journal", journal_path());
    if (::ftruncate(journal_fd, static_cast<off_t>(good_bytes)) != 0) io_fail("cannot truncate journal", journal_path());
    publish(std::make_shared<DocMap>(std::move(map)));
  }

  // Caller holds write_mu.
  void append(const Json& record) {
    if (journal_fd < 0) throw Error(ErrorCode::Precondition, "store is closed", std::string(to_string(collection)));
    write_all(journal_fd, canonical(record) + "\n", journal_path());
    if (::fdatasync(journal_fd) != 0) io_fail("fdatasync failed", journal_path());
    ++journal_lines;
  }

  // Caller holds write_mu.
  void compact_locked() {
    if (journal_fd < 0) return;
    const auto snapshot = current();
    Json docs = Json::array();
    for (const auto& [id, doc] : *snapshot) docs.push_back({{"id", id}, {"revision", doc->revision}, {"body", doc->body}});
    const Json out = {{"collection", to_string(collection)}, {"documents", std::move(docs)}};

    const fs::path tmp = dir / "snapshot.json.tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_fail("cannot write snapshot", tmp);
    write_all(fd, canonical(out) + "\n", tmp);
    if (::fsync(fd) != 0) io_fail("fsync failed", tmp);
    ::close(fd);
    fs::rename(tmp, snapshot_path());
    sync_dir(dir);
    // A crash before this point replays the journal on top of the new
    // snapshot, which is harmless because records carry absolute revisions.
    if (::ftruncate(journal_fd, 0) != 0) io_fail("cannot truncate journal", journal_path());
    ::fdatasync(journal_fd);
    journal_lines = 0;
  }
};

DocumentStore::DocumentStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create store directory: " + ec.message(), root_.string());
  for (std::size_t i = 0; i < shelves_.size(); ++i) {
    auto shelf = std::make_unique<Shelf>();
    shelf->collection = kAllCollections[i];
    shelf->dir = root_ / std::string(to_string(kAllCollections[i]));
    shelf->load();
    shelves_[i] = std::move(shelf);
  }
}

DocumentStore::~DocumentStore() {
  try {
    close();
  } catch (...) {
    // Journals are already durable; a failed compaction only costs replay time.
  }
}

DocumentStore::Shelf& DocumentStore::shelf(Collection c) const { return *shelves_[static_cast<std::size_t>(c)]; }

Document DocumentStore::put(Collection c, std::optional<std::string> id, Json body,
                            std::optional<std::uint64_t> expected_revision) {
  validate_body(c, body);
  if (id && !valid_id(*id)) throw Error(ErrorCode::Validation, "ids are 1..64 characters of [A-Za-z0-9_-]", "id");

  Shelf& s = shelf(c);
  std::lock_guard lock(s.write_mu);
  auto view = s.current();
  if (!id) {
    do id = random_id();
    while (view->count(*id));
  }
  const auto it = view->find(*id);
  const std::uint64_t previous = it == view->end() ? 0 : it->second->revision;
  if (expected_revision && *expected_revision != previous) {
    throw Error(ErrorCode::Conflict,
                "expected revision " + std::to_string(*expected_revision) + ", found " + std::to_string(previous),
                "revision");
  }

  auto doc = std::make_shared<Document>(Document{*id, c, std::move(body), previous + 1});
  s.append({{"op", "put"}, {"id", doc->id}, {"revision", doc->revision}, {"body", doc->body}});
  auto next = std::make_shared<DocMap>(*view);
  (*next)[doc->id] = doc;
  s.publish(std::move(next));
  if (s.journal_lines >= kCompactAfterLines) s.compact_locked();
  return *doc;
}

std::optional<Document> DocumentStore::find(Collection c, std::string_view id) const {
  const auto view = shelf(c).current();
  const auto it = view->find(id);
  if (it == view->end()) return std::nullopt;
  return *it->second;
}

Document DocumentStore::get(Collection c, std::string_view id) const {
  auto doc = find(c, id);
  if (!doc) throw Error(ErrorCode::NotFound, "no document '" + std::string(id) + "'", std::string(to_string(c)));
  return std::move(*doc);
}

std::vector<Document> DocumentStore::list(Collection c, const Json& filter) const {
  if (!filter.is_object()) throw Error(ErrorCode::Validation, "filter must be an object", "filter");
  const auto& known = known_fields(c);
  for (const auto& [key, value] : filter.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::Validation, "unknown filter field", "filter." + key);
    }
  }
  std::vector<Document> out;
  for (const auto& [id, doc] : *shelf(c).current()) {
    bool match = true;
    for (const auto& [key, value] : filter.items()) {
      const auto f = doc->body.find(key);
      if (f == doc->body.end() || *f != value) {
        match = false;
        break;
      }
    }
    if (match) out.push_back(*doc);
  }
  return out;
}

std::size_t DocumentStore::count(Collection c) const { return shelf(c).current()->size(); }

bool DocumentStore::remove(Collection c, std::string_view id) {
  Shelf& s = shelf(c);
  std::lock_guard lock(s.write_mu);
  auto view = s.current();
  if (!view->count(id)) return false;
  s.append({{"op", "delete"}, {"id", id}});
  auto next = std::make_shared<DocMap>(*view);
  next->erase(next->find(id));
  s.publish(std::move(next));
  return true;
}

void DocumentStore::compact(Collection c) {
  Shelf& s = shelf(c);
  std::lock_guard lock(s.write_mu);
  s.compact_locked();
}

void DocumentStore::close() {
  for (auto& shelf : shelves_) {
    if (!shelf) continue;
    std::lock_guard lock(shelf->write_mu);
    if (shelf->journal_fd < 0) continue;
    shelf->compact_locked();
    ::close(shelf->journal_fd);
    shelf->journal_fd = -1;
  }
}

}  // namespace holomed::store
