#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "holomed/protocol/hub.hpp"
#include "holomed/server/service.hpp"

namespace holomed::server {

struct ListenerCore;

struct ListenerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;
  int threads = 2;
  std::filesystem::path static_dir;  // empty serves a stub page at /
  std::filesystem::path assets_dir;  // served under /assets/
  // Poll clients that stop polling for this long are detached.
  std::chrono::milliseconds poll_idle_timeout{30000};
};

// HTTP/1.1 + WebSocket front end:
//   /ws       envelope stream, one hub client per connection
//   /api/...  REST (route table in listener.cpp)
//   /         static console files, /assets/ sprite sheets
class Listener {
 public:
  Listener(Service& service, protocol::Hub& hub, ListenerOptions options);
  ~Listener();

  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  // Binds and starts the io threads. Throws Error{Io} if the address is
  // unusable.
  void start();
  std::uint16_t port() const;

  // Stops accepting, writes out queued frames, closes every connection with
  // "going away", then joins the io threads.
  void stop();

 private:
  std::shared_ptr<ListenerCore> impl_;
};

}  // namespace holomed::server
