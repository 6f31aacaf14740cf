#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "holomed/protocol/messages.hpp"

namespace holomed::protocol {

// Runs its callback when the last frame holding it is released, i.e. once
// every streaming client has finished writing (or dropped) the message.
class DeliveryGroup {
 public:
  explicit DeliveryGroup(std::function<void()> done) : done_(std::move(done)) {}
  ~DeliveryGroup() {
    if (done_) done_();
  }
  DeliveryGroup(const DeliveryGroup&) = delete;
  DeliveryGroup& operator=(const DeliveryGroup&) = delete;

 private:
  std::function<void()> done_;
};

struct OutFrame {
  std::uint64_t seq = 0;
  std::string text;  // encoded envelope
  std::shared_ptr<DeliveryGroup> group;
};

enum class Transport { Stream, Poll };

// Fan-out to connected clients with a bounded queue each. A client whose
// queue would exceed the limit is dropped (queue cleared, wake called) so
// one stalled reader never holds up the rest. Thread-safe.
class Hub {
 public:
  static constexpr std::size_t kQueueLimit = 256;
  using ClientId = std::uint64_t;
  // Called without the hub lock when frames arrive or the client is dropped.
  using Wake = std::function<void()>;

  ClientId attach(ClientRole role, Transport transport, Wake wake = {},
                  std::optional<std::string> session_id = std::nullopt);
  // Role/session declared by a later Hello.
  void identify(ClientId id, ClientRole role, std::optional<std::string> session_id);
  void detach(ClientId id);

  // Enqueues to every client the message may reach (see deliverable_to);
  // clients bound to a session only get messages for that session or for
  // none. Returns the number of clients enqueued.
  std::size_t broadcast(const Message& message, std::int64_t sent_ms,
                        const std::optional<std::string>& session_id = std::nullopt,
                        std::shared_ptr<DeliveryGroup> group = nullptr);
  bool send(ClientId id, const Message& message, std::int64_t sent_ms);

  // Stream transports: pop everything queued.
  std::deque<OutFrame> take(ClientId id);
  // Poll transports: frames stay queued until a later call acknowledges
  // them with since >= their seq.
  std::vector<OutFrame> pending_after(ClientId id, std::uint64_t since);

  bool connected(ClientId id) const;
  bool dropped(ClientId id) const;
  std::size_t queue_depth(ClientId id) const;
  std::size_t client_count() const;
  std::optional<ClientRole> role(ClientId id) const;

 private:
  struct Client {
    ClientRole role = ClientRole::Console;
    Transport transport = Transport::Stream;
    Wake wake;
    std::optional<std::string> session_id;
    std::uint64_t next_seq = 1;
    std::deque<OutFrame> queue;
    bool dropped = false;
  };

  // Caller holds mu_. Returns false if the client was dropped.
  bool enqueue(Client& c, const Message& message, std::int64_t sent_ms, const std::shared_ptr<DeliveryGroup>& group);

  mutable std::mutex mu_;
  std::map<ClientId, Client> clients_;
  ClientId next_id_ = 1;
};

}  // namespace holomed::protocol
