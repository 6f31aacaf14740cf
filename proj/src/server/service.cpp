#include "holomed/server/service.hpp"

#include <charconv>
#include <chrono>

#include "holomed/error.hpp"
#include "holomed/ids.hpp"
#include "holomed/store/catalog.hpp"

namespace holomed::server {

using nlohmann::json;
using store::Collection;

MonotonicMs monotonic_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Conflict:
    case ErrorCode::Precondition: return 409;
    case ErrorCode::InvalidInput:
    case ErrorCode::Validation:
    case ErrorCode::Decode:
    case ErrorCode::Parse: return 400;
    default: return 500;
  }
}

Reply ok(json body, int status = 200) { return {status, std::move(body), {}}; }

json document_json(const store::Document& d) { return store::to_json(d); }

Reply document_reply(const store::Document& d, int status = 200) {
  Reply r = ok(document_json(d), status);
  r.headers["ETag"] = "\"" + std::to_string(d.revision) + "\"";
  return r;
}

std::optional<std::uint64_t> parse_if_match(const std::optional<std::string>& header) {
  if (!header) return std::nullopt;
  std::string_view v = *header;
  if (v.starts_with("W/")) v.remove_prefix(2);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  std::uint64_t rev = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), rev);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::Validation, "If-Match must be a revision number", "If-Match");
  }
  return rev;
}

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Validation, "malformed JSON", "byte " + std::to_string(e.byte));
  }
}

int reply_status(session::Outcome outcome) {
  switch (outcome) {
    case session::Outcome::Rejected: return 409;
    case session::Outcome::CaptureRetry: return 202;
    default: return 200;
  }
}

}  // namespace

Reply error_reply(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    json body = {{"code", to_string(err->code())}, {"message", err->what()}};
    if (!err->where().empty()) body["where"] = err->where();
    return {status_for(err->code()), {{"error", body}}, {}};
  }
  return {500, {{"error", {{"code", "internal"}, {"message", e.what()}}}}, {}};
}

struct Service::Live {
  std::mutex mu;
  session::Session session;
  explicit Live(session::Session s) : session(std::move(s)) {}
};

Service::Service(store::DocumentStore& store, protocol::Hub& hub, ServiceOptions options)
    : store_(store), hub_(hub), options_(options) {
  for (const auto& doc : store_.list(Collection::Sessions)) {
    try {
      auto state = session::session_state_from_json(doc.body);
      if (state.phase == session::Phase::Finished) continue;
      auto lesson = store::load_lesson(store_, state.lesson_id);
      if (!lesson) continue;
      sessions_.emplace(doc.id, std::make_shared<Live>(session::Session(std::move(*lesson), std::move(state))));
    } catch (const std::exception&) {
      // A stale session whose lesson changed shape is left in the store.
    }
  }
  for (const auto& doc : store_.list(Collection::LatencySamples)) {
    latency_->all.push_back(protocol::latency_sample_from_json(doc.body));
    next_gesture_seq_ = std::max(next_gesture_seq_, latency_->all.back().gesture_seq + 1);
  }
  presenter_ = std::jthread([this](std::stop_token st) { presenter_loop(st); });
  latency_writer_ = std::jthread([this](std::stop_token st) { latency_writer_loop(st); });
}

Service::~Service() { shutdown(); }

void Service::shutdown() {
  if (presenter_.joinable()) {
    presenter_.request_stop();
    presenter_.join();
  }
  if (latency_writer_.joinable()) {
    latency_writer_.request_stop();
    latency_writer_.join();
  }
}

std::shared_ptr<Service::Live> Service::find(const std::optional<std::string>& session_id) const {
  std::lock_guard lock(sessions_mu_);
  const std::string& id = session_id ? *session_id : active_id_;
  if (id.empty()) throw Error(ErrorCode::NotFound, "no active session; send X-Session-Id", "session_id");
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'", "session_id");
  return it->second;
}

void Service::persist(const Live& live) {
  const auto& state = live.session.state();
  store_.put(Collection::Sessions, state.session_id, session::to_json(state));
}

void Service::publish(Live& live, const session::Evaluation& ev, std::shared_ptr<protocol::DeliveryGroup> group) {
  const auto& state = live.session.state();
  const MonotonicMs now = monotonic_ms();
  hub_.broadcast(protocol::AnswerEvaluated{ev.outcome, ev.speak_text, state.stage_index, state.session_id, state.score},
                 now, state.session_id, std::move(group));
  if (!ev.speak_text.empty()) hub_.broadcast(protocol::SpeakText{ev.speak_text}, now, state.session_id);
}

void Service::schedule_presentation(Live& live, MonotonicMs now) {
  if (live.session.state().phase != session::Phase::Presenting) return;
  if (options_.presentation_ms == 0) {
    publish(live, live.session.advance(now));
    return;
  }
  {
    std::lock_guard lock(present_mu_);
    present_due_[live.session.state().session_id] = now + options_.presentation_ms;
  }
  present_cv_.notify_all();
}

void Service::presenter_loop(std::stop_token stop) {
  std::unique_lock lock(present_mu_);
  while (!stop.stop_requested()) {
    if (present_due_.empty()) {
      present_cv_.wait(lock, stop, [&] { return !present_due_.empty(); });
      continue;
    }
    MonotonicMs earliest = present_due_.begin()->second;
    for (const auto& [id, due] : present_due_) earliest = std::min(earliest, due);
    const MonotonicMs now = monotonic_ms();
    if (earliest > now) {
      present_cv_.wait_for(lock, stop, std::chrono::milliseconds(earliest - now), [] { return false; });
      continue;
    }
    std::vector<std::string> due_ids;
    for (auto it = present_due_.begin(); it != present_due_.end();) {
      if (it->second <= now) {
        due_ids.push_back(it->first);
        it = present_due_.erase(it);
      } else {
        ++it;
      }
    }
    lock.unlock();
    for (const auto& id : due_ids) {
      try {
        auto live = find(id);
        std::lock_guard session_lock(live->mu);
        if (live->session.state().phase != session::Phase::Presenting) continue;
        publish(*live, live->session.advance(monotonic_ms()));
        persist(*live);
      } catch (const std::exception&) {
        // Session vanished or the store closed during shutdown.
      }
    }
    lock.lock();
  }
}

void Service::latency_writer_loop(std::stop_token stop) {
  auto log = latency_;
  std::unique_lock lock(log->mu);
  for (;;) {
    log->cv.wait(lock, stop, [&] { return !log->pending.empty(); });
    std::vector<protocol::LatencySample> batch;
    batch.swap(log->pending);
    lock.unlock();
    for (const auto& s : batch) {
      try {
        store_.put(Collection::LatencySamples, std::nullopt, protocol::to_json(s));
      } catch (const std::exception&) {
        // Samples stay in memory; the report does not depend on the store.
      }
    }
    lock.lock();
    if (stop.stop_requested() && log->pending.empty()) return;
  }
}

Reply Service::start_session(const json& body) try {
  if (!body.is_object()) throw Error(ErrorCode::Validation, "must be an object", "body");
  auto field = [&](const char* name) {
    const auto it = body.find(name);
    if (it == body.end() || !it->is_string()) throw Error(ErrorCode::Validation, "must be a string", name);
    return it->get<std::string>();
  };
  const std::string student = field("student_id"), lesson = field("lesson_id");
  const MonotonicMs now = monotonic_ms();
  store::StoreCatalog catalog(store_);
  auto live = std::make_shared<Live>(session::start_session(catalog, student, lesson, random_id(), now));
  const std::string id = live->session.state().session_id;

  std::lock_guard session_lock(live->mu);
  {
    std::lock_guard lock(sessions_mu_);
    sessions_[id] = live;
    active_id_ = id;
  }
  const auto* stage = live->session.lesson().stage(1);
  const std::string intro = "Stage 1: " + (stage ? stage->name + ". " + stage->description : std::string{});
  hub_.broadcast(protocol::SpeakText{intro}, now, id);
  schedule_presentation(*live, now);
  persist(*live);
  return ok({{"session", session::to_json(live->session.state())}, {"speak_text", intro}}, 201);
} catch (const std::exception& e) {
  return error_reply(e);
}

Reply Service::submit_gesture(const std::optional<std::string>& session_id, std::string_view body,
                              MonotonicMs t_received) try {
  const json j = parse_body(body);
  GestureSubmission sub;
  sub.t_received = t_received;
  if (j.is_object() && j.contains("type")) {
    const auto envelope = protocol::decode(body);
    const auto* g = std::get_if<protocol::GestureDetected>(&envelope.payload);
    if (!g) throw Error(ErrorCode::Validation, "expected GestureDetected", "type");
    sub.gesture = *g;
    sub.t_capture = envelope.sent_ms;
  } else {
    sub.gesture = std::get<protocol::GestureDetected>(protocol::message_from_json("GestureDetected", j));
  }
  return submit_gesture(session_id, sub);
} catch (const std::exception& e) {
  return error_reply(e);
}

Reply Service::submit_gesture(const std::optional<std::string>& session_id, const GestureSubmission& sub) try {
  auto live = find(session_id);
  const auto binding = store::active_binding(store_);

  std::lock_guard session_lock(live->mu);
  auto& s = live->session;
  // Samples are filed under the stage the student was answering.
  const int stage_at_submission = s.state().stage_index;
  session::Evaluation ev;
  if (!sub.gesture.capture_ok) {
    auto failure = s.record_capture_failure(sub.t_received);
    ev = failure ? *failure
                 : session::Evaluation{session::Outcome::CaptureRetry,
                                       "I could not see that clearly. Please try again.", s.state().stage_index};
  } else {
    ev = s.submit_gesture(sub.gesture.kind, binding, sub.t_received);
  }
  const MonotonicMs t_evaluated = monotonic_ms();

  std::uint64_t seq;
  {
    std::lock_guard lock(sessions_mu_);
    seq = next_gesture_seq_++;
  }
  protocol::LatencySample sample{seq,
                                 sub.t_capture,
                                 sub.t_received,
                                 t_evaluated,
                                 0,
                                 stage_at_submission,
                                 s.state().session_id,
                                 std::string(gesture::to_string(sub.gesture.kind))};
  std::weak_ptr<LatencyLog> weak_log = latency_;
  auto group = std::make_shared<protocol::DeliveryGroup>([weak_log, sample]() mutable {
    sample.t_broadcast = std::max(sample.t_evaluated, monotonic_ms());
    if (auto log = weak_log.lock()) {
      {
        std::lock_guard lock(log->mu);
        log->all.push_back(sample);
        log->pending.push_back(sample);
      }
      log->cv.notify_all();
    }
  });
  publish(*live, ev, std::move(group));
  schedule_presentation(*live, t_evaluated);
  persist(*live);

  const auto& state = s.state();
  return ok({{"outcome", session::to_string(ev.outcome)},
             {"speak_text", ev.speak_text},
             {"stage_index", state.stage_index},
             {"session_id", state.session_id},
             {"score", state.score},
             {"phase", session::to_string(state.phase)}},
            reply_status(ev.outcome));
} catch (const std::exception& e) {
  return error_reply(e);
}

Reply Service::crud(std::string_view method, std::string_view collection_name, const std::optional<std::string>& id,
                    std::string_view body, const std::optional<std::string>& if_match,
                    const std::map<std::string, std::string>& query) try {
  Collection c;
  try {
    c = store::collection_from_string(collection_name);
  } catch (const Error&) {
    throw Error(ErrorCode::NotFound, "unknown collection '" + std::string(collection_name) + "'", "collection");
  }
  const bool read_only = c == Collection::Sessions || c == Collection::LatencySamples;

  if (method == "GET") {
    if (id) return document_reply(store_.get(c, *id));
    json filter = json::object();
    for (const auto& [key, value] : query) {
      try {
        filter[key] = json::parse(value);
      } catch (const json::parse_error&) {
        filter[key] = value;
      }
    }
    json docs = json::array();
    for (const auto& d : store_.list(c, filter)) docs.push_back(document_json(d));
    return ok({{"documents", std::move(docs)}});
  }
  if (read_only) return {405, {{"error", {{"code", "method_not_allowed"}, {"message", "read-only collection"}}}}, {}};

  Reply reply;
  if (method == "POST" && !id) {
    reply = document_reply(store_.put(c, std::nullopt, parse_body(body), parse_if_match(if_match)), 201);
  } else if (method == "PUT" && id) {
    reply = document_reply(store_.put(c, *id, parse_body(body), parse_if_match(if_match)));
  } else if (method == "DELETE" && id) {
    reply = ok({{"deleted", store_.remove(c, *id)}});
  } else {
    return {405, {{"error", {{"code", "method_not_allowed"}, {"message", "unsupported method for this path"}}}}, {}};
  }

  if (c == Collection::HologramOptions && id == store::kDefaultDocId) {
    std::function<void(const store::HologramOptions&)> callback;
    {
      std::lock_guard lock(hologram_mu_);
      callback = hologram_callback_;
    }
    if (callback) callback(store::active_hologram_options(store_));
  }
  return reply;
} catch (const std::exception& e) {
  return error_reply(e);
}

Reply Service::validate_lesson(const std::string& lesson_id) try {
  json violations = json::array();
  for (const auto& v : store::validate_lesson(store_, lesson_id)) {
    violations.push_back({{"kind", session::to_string(v.kind)}, {"detail", v.detail}});
  }
  return ok({{"lesson_id", lesson_id}, {"ok", violations.empty()}, {"violations", std::move(violations)}});
} catch (const std::exception& e) {
  return error_reply(e);
}

Reply Service::latency_report(bool as_text) const {
  const auto report = protocol::measure_latency(latency_samples());
  if (as_text) return ok(protocol::format_report(report));
  return ok(protocol::to_json(report));
}

Reply Service::health() const {
  std::size_t sessions;
  std::string active;
  {
    std::lock_guard lock(sessions_mu_);
    sessions = sessions_.size();
    active = active_id_;
  }
  return ok({{"status", "ok"},
             {"sessions", sessions},
             {"active_session", active.empty() ? json(nullptr) : json(active)},
             {"clients", hub_.client_count()},
             {"sheet", current_sheet()}});
}

int Service::current_sheet() const {
  std::shared_ptr<Live> live;
  {
    std::lock_guard lock(sessions_mu_);
    const auto it = sessions_.find(active_id_);
    if (it == sessions_.end()) return 1;
    live = it->second;
  }
  std::lock_guard lock(live->mu);
  return live->session.stage_for_projection();
}

std::optional<session::SessionState> Service::session_state(const std::string& session_id) const {
  std::shared_ptr<Live> live;
  {
    std::lock_guard lock(sessions_mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    live = it->second;
  }
  std::lock_guard lock(live->mu);
  return live->session.state();
}

std::vector<protocol::LatencySample> Service::latency_samples() const {
  std::lock_guard lock(latency_->mu);
  return latency_->all;
}

void Service::on_hologram_change(std::function<void(const store::HologramOptions&)> callback) {
  std::lock_guard lock(hologram_mu_);
  hologram_callback_ = std::move(callback);
}

}  // namespace holomed::server
