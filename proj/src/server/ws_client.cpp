#include "holomed/server/ws_client.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "holomed/error.hpp"
#include "holomed/server/service.hpp"

namespace holomed::server {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct WsClient::Impl : std::enable_shared_from_this<WsClient::Impl> {
  net::io_context ioc;
  websocket::stream<beast::tcp_stream> ws{net::make_strand(ioc)};
  beast::flat_buffer buffer;
  std::thread thread;

  mutable std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> inbox;
  bool closed = false;
  std::optional<int> close_code;

  // Strand-only state.
  std::deque<std::string> outbox;
  bool writing = false;
  std::uint64_t seq = 0;

  void do_read() {
    ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        std::lock_guard lock(self->mu);
        self->closed = true;
        if (self->ws.reason().code != websocket::close_code::none) self->close_code = self->ws.reason().code;
        self->cv.notify_all();
        return;
      }
      {
        std::lock_guard lock(self->mu);
        self->inbox.push_back(beast::buffers_to_string(self->buffer.data()));
      }
      self->buffer.consume(self->buffer.size());
      self->cv.notify_all();
      self->do_read();
    });
  }

  void write_next() {
    if (outbox.empty()) {
      writing = false;
      return;
    }
    writing = true;
    ws.text(true);
    ws.async_write(net::buffer(outbox.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->outbox.pop_front();
      if (ec) {
        self->outbox.clear();
        self->writing = false;
        return;
      }
      self->write_next();
    });
  }

  void enqueue(std::string text) {
    net::post(ws.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->outbox.push_back(std::move(text));
      if (!self->writing) self->write_next();
    });
  }
};

WsClient::WsClient(const std::string& host, std::uint16_t port, protocol::ClientRole role,
                   std::optional<std::string> session_id)
    : impl_(std::make_shared<Impl>()) {
  try {
    tcp::resolver resolver(impl_->ioc);
    const auto results = resolver.resolve(host, std::to_string(port));
    beast::get_lowest_layer(impl_->ws).connect(results);
    beast::get_lowest_layer(impl_->ws).socket().set_option(tcp::no_delay(true));
    impl_->ws.handshake(host + ":" + std::to_string(port), "/ws");
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::Io, e.what(), host + ":" + std::to_string(port));
  }
  impl_->do_read();
  impl_->thread = std::thread([impl = impl_] { impl->ioc.run(); });
  send(protocol::Hello{role, std::move(session_id)});
}

WsClient::~WsClient() { close(); }

void WsClient::send(const protocol::Message& message) {
  net::post(impl_->ws.get_executor(), [impl = impl_, message] {
    impl->outbox.push_back(protocol::encode({++impl->seq, monotonic_ms(), message}));
    if (!impl->writing) impl->write_next();
  });
}

void WsClient::send_text(std::string text) { impl_->enqueue(std::move(text)); }

std::optional<protocol::Envelope> WsClient::receive(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait_for(lock, timeout, [&] { return !impl_->inbox.empty() || impl_->closed; });
  if (impl_->inbox.empty()) return std::nullopt;
  std::string text = std::move(impl_->inbox.front());
  impl_->inbox.pop_front();
  lock.unlock();
  return protocol::decode(text);
}

std::optional<protocol::Envelope> WsClient::receive_until(const std::function<bool(const protocol::Envelope&)>& pred,
                                                          std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    auto env = receive(left);
    if (!env) return std::nullopt;
    if (pred(*env)) return env;
  }
}

bool WsClient::closed() const {
  std::lock_guard lock(impl_->mu);
  return impl_->closed;
}

std::optional<int> WsClient::close_code() const {
  std::lock_guard lock(impl_->mu);
  return impl_->close_code;
}

void WsClient::close() {
  if (!impl_->thread.joinable()) return;
  net::post(impl_->ws.get_executor(), [impl = impl_] {
    if (impl->ws.is_open()) impl->ws.async_close(websocket::close_code::normal, [impl](beast::error_code) {});
  });
  {
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait_for(lock, std::chrono::seconds(2), [&] { return impl_->closed; });
  }
  impl_->ioc.stop();
  impl_->thread.join();
  // Complete whatever is still queued so the handlers release the impl.
  beast::error_code ec;
  beast::get_lowest_layer(impl_->ws).socket().close(ec);
  impl_->ioc.restart();
  impl_->ioc.run();
}

}  // namespace holomed::server
