#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "holomed/protocol/messages.hpp"

namespace holomed::server {

// Blocking facade over an asynchronous WebSocket connection to /ws. A
// private io thread reads continuously, so a slow caller never stalls the
// server's writes to this client. Thread-safe.
class WsClient {
 public:
  // Connects and sends Hello{role, session_id}. Throws Error{Io}.
  WsClient(const std::string& host, std::uint16_t port, protocol::ClientRole role,
           std::optional<std::string> session_id = std::nullopt);
  ~WsClient();

  WsClient(const WsClient&) = delete;
  WsClient& operator=(const WsClient&) = delete;

  void send(const protocol::Message& message);
  // Queues raw text, for malformed-input tests.
  void send_text(std::string text);

  // nullopt on timeout or once the connection has closed and drained.
  std::optional<protocol::Envelope> receive(std::chrono::milliseconds timeout);
  // Discards envelopes until one satisfies pred.
  std::optional<protocol::Envelope> receive_until(const std::function<bool(const protocol::Envelope&)>& pred,
                                                  std::chrono::milliseconds timeout);

  bool closed() const;
  // Close code sent by the server, if it closed the connection.
  std::optional<int> close_code() const;

  void close();

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace holomed::server
