#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "holomed/protocol/hub.hpp"
#include "holomed/protocol/latency.hpp"
#include "holomed/session/session.hpp"
#include "holomed/store/document_store.hpp"

namespace holomed::server {

using MonotonicMs = std::int64_t;

// Server clock for every latency timestamp.
MonotonicMs monotonic_ms();

struct Reply {
  int status = 200;
  nlohmann::json body;
  std::map<std::string, std::string> headers;
};

// Maps an Error to 400/404/409/500 with {"error": {code, message, where}}.
Reply error_reply(const std::exception& e);

struct ServiceOptions {
  int presentation_ms = 0;
};

struct GestureSubmission {
  protocol::GestureDetected gesture;
  std::int64_t t_capture = 0;  // source clock, informational
  MonotonicMs t_received = 0;
};

// Everything the listener does that is not transport: sessions, gesture
// evaluation, CRUD mapping, latency samples. Operations on one session are
// serialized; different sessions run in parallel.
class Service {
 public:
  Service(store::DocumentStore& store, protocol::Hub& hub, ServiceOptions options = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // POST /api/sessions {"student_id", "lesson_id"} -> 201 with the state.
  Reply start_session(const nlohmann::json& body);

  // POST /api/gestures. body is a GestureDetected payload or a full
  // envelope. Without a session id the most recently started unfinished
  // session is used.
  Reply submit_gesture(const std::optional<std::string>& session_id, std::string_view body, MonotonicMs t_received);
  Reply submit_gesture(const std::optional<std::string>& session_id, const GestureSubmission& submission);

  Reply crud(std::string_view method, std::string_view collection, const std::optional<std::string>& id,
             std::string_view body, const std::optional<std::string>& if_match,
             const std::map<std::string, std::string>& query);

  Reply validate_lesson(const std::string& lesson_id);
  Reply latency_report(bool as_text) const;
  Reply health() const;

  // Sheet for the tick loop: the active session's stage, else sheet 1.
  int current_sheet() const;
  std::optional<session::SessionState> session_state(const std::string& session_id) const;
  std::vector<protocol::LatencySample> latency_samples() const;

  void on_hologram_change(std::function<void(const store::HologramOptions&)> callback);

  // Stops the presenter and flushes pending latency writes.
  void shutdown();

 private:
  struct Live;

  std::shared_ptr<Live> find(const std::optional<std::string>& session_id) const;
  void publish(Live& live, const session::Evaluation& ev, std::shared_ptr<protocol::DeliveryGroup> group = nullptr);
  void persist(const Live& live);
  void schedule_presentation(Live& live, MonotonicMs now);
  void presenter_loop(std::stop_token stop);
  void latency_writer_loop(std::stop_token stop);

  store::DocumentStore& store_;
  protocol::Hub& hub_;
  ServiceOptions options_;

  mutable std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
  std::string active_id_;
  std::uint64_t next_gesture_seq_ = 1;

  std::mutex hologram_mu_;
  std::function<void(const store::HologramOptions&)> hologram_callback_;

  // Shared with in-flight delivery groups, which may outlive the service.
  struct LatencyLog {
    std::mutex mu;
    std::condition_variable_any cv;
    std::vector<protocol::LatencySample> all;
    std::vector<protocol::LatencySample> pending;
  };
  std::shared_ptr<LatencyLog> latency_ = std::make_shared<LatencyLog>();

  std::mutex present_mu_;
  std::condition_variable_any present_cv_;
  std::map<std::string, MonotonicMs> present_due_;

  std::jthread presenter_;
  std::jthread latency_writer_;
};

}  // namespace holomed::server
