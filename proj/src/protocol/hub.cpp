#include "holomed/protocol/hub.hpp"

namespace holomed::protocol {

Hub::ClientId Hub::attach(ClientRole role, Transport transport, Wake wake, std::optional<std::string> session_id) {
  std::lock_guard lock(mu_);
  const ClientId id = next_id_++;
  Client& c = clients_[id];
  c.role = role;
  c.transport = transport;
  c.wake = std::move(wake);
  c.session_id = std::move(session_id);
  return id;
}

void Hub::identify(ClientId id, ClientRole role, std::optional<std::string> session_id) {
  std::lock_guard lock(mu_);
  if (auto it = clients_.find(id); it != clients_.end()) {
    it->second.role = role;
    it->second.session_id = std::move(session_id);
  }
}

void Hub::detach(ClientId id) {
  std::deque<OutFrame> released;  // frames die outside the lock
  std::lock_guard lock(mu_);
  if (auto it = clients_.find(id); it != clients_.end()) {
    released.swap(it->second.queue);
    clients_.erase(it);
  }
}

bool Hub::enqueue(Client& c, const Message& message, std::int64_t sent_ms,
                  const std::shared_ptr<DeliveryGroup>& group) {
  if (c.dropped) return false;
  if (c.queue.size() >= kQueueLimit) {
    c.dropped = true;
    c.queue.clear();
    return false;
  }
  const std::uint64_t seq = c.next_seq++;
  c.queue.push_back({seq, encode(Envelope{seq, sent_ms, message}), c.transport == Transport::Stream ? group : nullptr});
  return true;
}

std::size_t Hub::broadcast(const Message& message, std::int64_t sent_ms, const std::optional<std::string>& session_id,
                           std::shared_ptr<DeliveryGroup> group) {
  std::vector<Wake> wakes;
  std::size_t delivered = 0;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, c] : clients_) {
      if (c.dropped || !deliverable_to(c.role, message)) continue;
      if (c.session_id && session_id && *c.session_id != *session_id) continue;
      const bool was_empty = c.queue.empty();
      if (enqueue(c, message, sent_ms, group)) {
        ++delivered;
        if (was_empty && c.wake) wakes.push_back(c.wake);
      } else if (c.wake) {
        wakes.push_back(c.wake);
      }
    }
  }
  group.reset();
  for (auto& w : wakes) w();
  return delivered;
}

bool Hub::send(ClientId id, const Message& message, std::int64_t sent_ms) {
  Wake wake;
  bool ok = false;
  {
    std::lock_guard lock(mu_);
    const auto it = clients_.find(id);
    if (it == clients_.end()) return false;
    ok = enqueue(it->second, message, sent_ms, nullptr);
    wake = it->second.wake;
  }
  if (wake) wake();
  return ok;
}

std::deque<OutFrame> Hub::take(ClientId id) {
  std::deque<OutFrame> out;
  std::lock_guard lock(mu_);
  if (auto it = clients_.find(id); it != clients_.end()) out.swap(it->second.queue);
  return out;
}

std::vector<OutFrame> Hub::pending_after(ClientId id, std::uint64_t since) {
  std::vector<OutFrame> out;
  std::lock_guard lock(mu_);
  const auto it = clients_.find(id);
  if (it == clients_.end()) return out;
  auto& q = it->second.queue;
  while (!q.empty() && q.front().seq <= since) q.pop_front();
  out.assign(q.begin(), q.end());
  return out;
}

bool Hub::connected(ClientId id) const {
  std::lock_guard lock(mu_);
  const auto it = clients_.find(id);
  return it != clients_.end() && !it->second.dropped;
}

bool Hub::dropped(ClientId id) const {
  std::lock_guard lock(mu_);
  const auto it = clients_.find(id);
  return it != clients_.end() && it->second.dropped;
}

std::size_t Hub::queue_depth(ClientId id) const {
  std::lock_guard lock(mu_);
  const auto it = clients_.find(id);
  return it == clients_.end() ? 0 : it->second.queue.size();
}

std::size_t Hub::client_count() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [id, c] : clients_) n += !c.dropped;
  return n;
}

std::optional<ClientRole> Hub::role(ClientId id) const {
  std::lock_guard lock(mu_);
  const auto it = clients_.find(id);
  if (it == clients_.end()) return std::nullopt;
  return it->second.role;
}

}  // namespace holomed::protocol
