#include "holomed/server/listener.hpp"

#include <atomic>
#include <deque>
#include <fstream>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "holomed/error.hpp"
#include "holomed/protocol/messages.hpp"
#include "holomed/server/http_util.hpp"

// Routes
//   GET    /api/health
//   POST   /api/sessions                 start a session
//   POST   /api/gestures                 X-Session-Id header or ?session_id=
//   GET    /api/lessons/<id>/validate
//   GET    /api/latency[?format=text]
//   GET    /api/poll?client=&since=&wait_ms=&role=&session_id=
//   *      /api/<collection>[/<id>]      document CRUD, If-Match for CAS
//   GET    /ws                           WebSocket upgrade
//   GET    /assets/<file>, /<file>       static

namespace holomed::server {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;
using protocol::Hub;

namespace {

constexpr std::size_t kBodyLimit = 1 << 20;
constexpr int kMaxPollWaitMs = 30000;

const char* const kStubPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>HoloMed</title></head>
<body>
<h1>HoloMed server</h1>
<p>No console build is configured. Set <code>server.static_dir</code> to the console output directory.</p>
<ul>
<li><a href="/api/health">/api/health</a></li>
<li><a href="/api/latency?format=text">/api/latency</a></li>
<li><a href="/assets/manifest.json">/assets/manifest.json</a></li>
</ul>
</body></html>
)";

std::string_view view(beast::string_view s) { return {s.data(), s.size()}; }

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

Response make_response(const Request& req, http::status status, std::string body, std::string_view content_type) {
  Response res{status, req.version()};
  const beast::string_view type(content_type.data(), content_type.size());
  res.set(http::field::server, "holomed");
  res.set(http::field::content_type, type);
  res.set(http::field::access_control_allow_origin, "*");
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

Response json_response(const Request& req, const Reply& reply) {
  auto res = make_response(req, static_cast<http::status>(reply.status), reply.body.dump(-1, ' ', false, json::error_handler_t::replace),
                           "application/json");
  for (const auto& [k, v] : reply.headers) res.set(k, v);
  return res;
}

Reply method_not_allowed() {
  return {405, {{"error", {{"code", "method_not_allowed"}, {"message", "unsupported method for this path"}}}}, {}};
}

Reply not_found(const std::string& what) {
  return {404, {{"error", {{"code", "not_found"}, {"message", what}}}}, {}};
}

std::optional<std::string> header(const Request& req, std::string_view name) {
  const auto it = req.find(beast::string_view(name.data(), name.size()));
  if (it == req.end()) return std::nullopt;
  return std::string(it->value());
}

std::optional<std::string> query_value(const Target& t, const std::string& key) {
  const auto it = t.query.find(key);
  if (it == t.query.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

protocol::ClientRole role_param(const Target& t, protocol::ClientRole fallback) {
  const auto role = query_value(t, "role");
  return role ? protocol::client_role_from_string(*role) : fallback;
}

std::int64_t integer_param(const Target& t, const std::string& key, std::int64_t fallback) {
  const auto v = query_value(t, key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const auto n = std::stoll(*v, &used);
    if (used == v->size() && n >= 0) return n;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidInput, "must be a non-negative integer", key);
}

}  // namespace

class Connection {
 public:
  virtual ~Connection() = default;
  virtual void close() = 0;
};

struct ListenerCore : std::enable_shared_from_this<ListenerCore> {
  ListenerCore(Service& s, Hub& h, ListenerOptions o) : service(s), hub(h), options(std::move(o)) {}

  struct PollClient {
    std::weak_ptr<class HttpSession> waiter;
    std::chrono::steady_clock::time_point last_seen;
  };

  Service& service;
  Hub& hub;
  ListenerOptions options;
  std::uint16_t bound_port = 0;
  std::vector<std::thread> threads;
  std::atomic<bool> stopping{false};

  std::mutex connections_mu;
  std::map<Connection*, std::weak_ptr<Connection>> connections;

  std::mutex poll_mu;
  std::map<Hub::ClientId, PollClient> poll_clients;

  // Declared last: destroyed first, taking queued handlers with it while
  // the members they reference are still alive.
  net::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::optional<net::steady_timer> reaper;

  void add(const std::shared_ptr<Connection>& c) {
    std::lock_guard lock(connections_mu);
    connections[c.get()] = c;
  }
  void remove(Connection* c) {
    std::lock_guard lock(connections_mu);
    connections.erase(c);
  }
  std::size_t open_connections() {
    std::lock_guard lock(connections_mu);
    return connections.size();
  }

  void do_accept();
  void schedule_reap();
  void wake_poll(Hub::ClientId id);
};

// One WebSocket connection: a hub Stream client. Frames leave in hub order
// and are released (closing their delivery groups) when the write finishes.
class WsSession : public Connection, public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(ListenerCore& impl, tcp::socket&& socket) : impl_(impl), ws_(std::move(socket)) {}

  ~WsSession() override {
    if (id_) impl_.hub.detach(id_);
    impl_.remove(this);
  }

  void run(Request req) {
    try {
      const auto target = parse_target(view(req.target()));
      role_ = role_param(target, protocol::ClientRole::Console);
      session_ = query_value(target, "session_id");
    } catch (const std::exception&) {
      // Bad query strings fall back to an anonymous console.
    }
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.set_option(websocket::stream_base::decorator(
        [](websocket::response_type& res) { res.set(http::field::server, "holomed"); }));
    ws_.read_message_max(kBodyLimit);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  void close() override {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      self->closing_ = true;
      if (!self->writing_) self->write_next();
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<WsSession> weak = shared_from_this();
    id_ = impl_.hub.attach(role_, protocol::Transport::Stream,
                           [weak] {
                             if (auto self = weak.lock()) net::post(self->ws_.get_executor(), [self] { self->flush(); });
                           },
                           session_);
    impl_.add(shared_from_this());
    if (impl_.stopping) closing_ = true;
    do_read();
    flush();
  }

  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) return;  // closed or failed; the destructor detaches
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (!ws_.got_text()) {
      notice("decode", "binary frames are not accepted");
    } else {
      handle(text);
    }
    do_read();
  }

  void notice(std::string code, std::string text) {
    impl_.hub.send(id_, protocol::ErrorNotice{std::move(code), std::move(text)}, monotonic_ms());
  }

  void handle(const std::string& text) {
    const MonotonicMs t_received = monotonic_ms();
    protocol::Envelope env;
    try {
      env = protocol::decode(text);
    } catch (const Error& e) {
      notice("decode", e.where().empty() ? e.what() : e.where() + ": " + e.what());
      return;
    }
    if (!protocol::accepted_from(role_, env.payload)) {
      notice("forbidden", std::string(protocol::type_name(env.payload)) + " is not accepted from " +
                              std::string(protocol::to_string(role_)));
      return;
    }
    if (const auto* hello = std::get_if<protocol::Hello>(&env.payload)) {
      role_ = hello->role;
      session_ = hello->session_id;
      impl_.hub.identify(id_, role_, session_);
    } else if (const auto* g = std::get_if<protocol::GestureDetected>(&env.payload)) {
      const auto reply = impl_.service.submit_gesture(session_, GestureSubmission{*g, env.sent_ms, t_received});
      if (reply.status >= 400) {
        const auto& err = reply.body["error"];
        notice(err.value("code", "error"), err.value("message", ""));
      }
    } else if (const auto* ping = std::get_if<protocol::Ping>(&env.payload)) {
      const auto now = monotonic_ms();
      impl_.hub.send(id_, protocol::Pong{ping->nonce, now}, now);
    }
  }

  void flush() {
    if (impl_.hub.dropped(id_)) {
      // Fell too far behind; the hub already discarded the queue.
      outbox_.clear();
      closing_ = true;
      close_code_ = websocket::close_code::policy_error;
    }
    for (auto& f : impl_.hub.take(id_)) outbox_.push_back(std::move(f));
    if (!writing_) write_next();
  }

  void write_next() {
    if (outbox_.empty()) {
      writing_ = false;
      if (closing_ && !close_sent_) {
        close_sent_ = true;
        ws_.async_close(close_code_, [self = shared_from_this()](beast::error_code) {});
      }
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front().text), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->outbox_.pop_front();
      if (ec) {
        self->outbox_.clear();
        self->writing_ = false;
        return;
      }
      self->write_next();
    });
  }

  ListenerCore& impl_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  Hub::ClientId id_ = 0;
  protocol::ClientRole role_ = protocol::ClientRole::Console;
  std::optional<std::string> session_;
  std::deque<protocol::OutFrame> outbox_;
  bool writing_ = false;
  bool closing_ = false;
  bool close_sent_ = false;
  websocket::close_code close_code_ = websocket::close_code::going_away;
};

class HttpSession : public Connection, public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(ListenerCore& impl, tcp::socket&& socket)
      : impl_(impl), stream_(std::move(socket)), poll_timer_(stream_.get_executor()) {}

  ~HttpSession() override { impl_.remove(this); }

  void start() {
    impl_.add(shared_from_this());
    net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->do_read(); });
  }

  void close() override {
    net::post(stream_.get_executor(), [self = shared_from_this()] {
      self->closing_ = true;
      self->poll_timer_.cancel();
      if (!self->busy_) self->shutdown();
    });
  }

  // Called by the poll wake path on this session's strand.
  void wake() { poll_timer_.cancel(); }
  auto executor() { return stream_.get_executor(); }

 private:
  void shutdown() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_both, ec);
    stream_.close();
  }

  void do_read() {
    if (closing_) return shutdown();
    busy_ = false;
    parser_.emplace();
    parser_->body_limit(kBodyLimit);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec != http::error::end_of_stream && ec.category() == http::make_error_code(http::error::end_of_stream).category()) {
      return reject_malformed(ec);
    }
    if (ec) return shutdown();
    busy_ = true;
    const MonotonicMs t_received = monotonic_ms();
    Request req = parser_->release();

    if (websocket::is_upgrade(req)) {
      if (parse_target(view(req.target())).path != "/ws") return send(make_response(req, http::status::not_found, "", "text/plain"));
      stream_.expires_never();
      std::make_shared<WsSession>(impl_, stream_.release_socket())->run(std::move(req));
      return;
    }
    try {
      route(req, t_received);
    } catch (const std::exception& e) {
      send(json_response(req, error_reply(e)));
    }
  }

  // The stream is out of sync after a parse failure, so answer and close.
  void reject_malformed(beast::error_code ec) {
    Request req;
    req.version(11);
    req.keep_alive(false);
    send(json_response(req, error_reply(Error(ErrorCode::InvalidInput, "malformed HTTP request", ec.message()))));
  }

  void send(Response res) {
    auto sp = std::make_shared<Response>(std::move(res));
    stream_.expires_after(std::chrono::seconds(30));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec || !sp->keep_alive()) return self->shutdown();
      self->do_read();
    });
  }

  void route(const Request& req, MonotonicMs t_received) {
    const Target t = parse_target(view(req.target()));
    const auto& seg = t.segments;
    const auto method = req.method();
    auto& service = impl_.service;

    if (seg.empty() || seg[0] != "api") return serve_static(req, t);

    auto reply = [&](const Reply& r) { send(json_response(req, r)); };
    const std::string_view verb = view(req.method_string());

    if (seg.size() == 2 && seg[1] == "health") return reply(method == http::verb::get ? service.health() : method_not_allowed());
    if (seg.size() == 2 && seg[1] == "poll") return method == http::verb::get ? poll(req, t) : reply(method_not_allowed());
    if (seg.size() == 2 && seg[1] == "latency") {
      if (method != http::verb::get) return reply(method_not_allowed());
      const bool text = t.query.count("format") && t.query.at("format") == "text";
      const auto r = service.latency_report(text);
      if (text) return send(make_response(req, http::status::ok, r.body.get<std::string>(), "text/plain; charset=utf-8"));
      return reply(r);
    }
    if (seg.size() == 2 && seg[1] == "gestures") {
      if (method != http::verb::post) return reply(method_not_allowed());
      auto session = header(req, "X-Session-Id");
      if (!session) session = query_value(t, "session_id");
      return reply(service.submit_gesture(session, req.body(), t_received));
    }
    if (seg.size() == 2 && seg[1] == "sessions" && method == http::verb::post) {
      json body;
      try {
        body = json::parse(req.body());
      } catch (const json::parse_error& e) {
        return reply(error_reply(Error(ErrorCode::Validation, "malformed JSON", "byte " + std::to_string(e.byte))));
      }
      return reply(service.start_session(body));
    }
    if (seg.size() == 4 && seg[1] == "lessons" && seg[3] == "validate") {
      return reply(method == http::verb::get ? service.validate_lesson(seg[2]) : method_not_allowed());
    }
    if (seg.size() == 2 || seg.size() == 3) {
      const std::optional<std::string> id = seg.size() == 3 ? std::optional(seg[2]) : std::nullopt;
      return reply(service.crud(verb, seg[1], id, req.body(), header(req, "If-Match"), t.query));
    }
    reply(not_found("no route for " + t.path));
  }

  void serve_static(const Request& req, const Target& t) {
    if (req.method() != http::verb::get && req.method() != http::verb::head) {
      return send(json_response(req, method_not_allowed()));
    }
    std::optional<std::filesystem::path> file;
    if (!t.segments.empty() && t.segments[0] == "assets") {
      file = resolve_under(impl_.options.assets_dir, t.path.substr(std::string_view("/assets").size()));
    } else if (!impl_.options.static_dir.empty()) {
      file = resolve_under(impl_.options.static_dir, t.path == "/" ? "/index.html" : t.path);
      // Client-side routes fall back to the console entry point.
      if (!file && t.path.find('.') == std::string::npos) file = resolve_under(impl_.options.static_dir, "/index.html");
    } else if (t.path == "/" || t.path == "/index.html") {
      return send(make_response(req, http::status::ok, kStubPage, "text/html; charset=utf-8"));
    }
    if (!file) return send(json_response(req, not_found("no file at " + t.path)));
    std::ifstream in(*file, std::ios::binary);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto res = make_response(req, http::status::ok, std::move(body), mime_type(*file));
    if (req.method() == http::verb::head) res.body().clear();
    send(std::move(res));
  }

  void poll(const Request& req, const Target& t) {
    auto& hub = impl_.hub;
    const auto client = query_value(t, "client");
    if (!client) {
      auto slot = std::make_shared<std::atomic<Hub::ClientId>>(0);
      std::weak_ptr<ListenerCore> weak_impl = impl_.shared_from_this();
      const auto id = hub.attach(role_param(t, protocol::ClientRole::Console), protocol::Transport::Poll,
                                 [weak_impl, slot] {
                                   if (auto impl = weak_impl.lock()) impl->wake_poll(slot->load());
                                 },
                                 query_value(t, "session_id"));
      slot->store(id);
      {
        std::lock_guard lock(impl_.poll_mu);
        impl_.poll_clients[id] = {{}, std::chrono::steady_clock::now()};
      }
      return send(json_response(req, {200, {{"client", id}, {"frames", json::array()}, {"last_seq", 0}}, {}}));
    }

    const Hub::ClientId id = static_cast<Hub::ClientId>(integer_param(t, "client", 0));
    const auto since = static_cast<std::uint64_t>(integer_param(t, "since", 0));
    const auto wait_ms = std::min<std::int64_t>(integer_param(t, "wait_ms", 0), kMaxPollWaitMs);
    {
      std::lock_guard lock(impl_.poll_mu);
      const auto it = impl_.poll_clients.find(id);
      if (it == impl_.poll_clients.end()) return send(json_response(req, not_found("unknown poll client")));
      it->second.last_seen = std::chrono::steady_clock::now();
      it->second.waiter = shared_from_this();
    }
    poll_req_ = req;
    poll_id_ = id;
    poll_since_ = since;
    if (wait_ms == 0 || has_frames_or_gone()) return finish_poll();
    stream_.expires_never();
    poll_timer_.expires_after(std::chrono::milliseconds(wait_ms));
    poll_timer_.async_wait([self = shared_from_this()](beast::error_code) { self->finish_poll(); });
  }

  bool has_frames_or_gone() { return impl_.hub.dropped(poll_id_) || !pending().empty(); }
  std::vector<protocol::OutFrame> pending() { return impl_.hub.pending_after(poll_id_, poll_since_); }

  void finish_poll() {
    {
      std::lock_guard lock(impl_.poll_mu);
      const auto it = impl_.poll_clients.find(poll_id_);
      if (it != impl_.poll_clients.end()) {
        it->second.waiter.reset();
        it->second.last_seen = std::chrono::steady_clock::now();
      }
    }
    if (impl_.hub.dropped(poll_id_)) {
      impl_.hub.detach(poll_id_);
      std::lock_guard lock(impl_.poll_mu);
      impl_.poll_clients.erase(poll_id_);
      return send(json_response(poll_req_, {410, {{"error", {{"code", "gone"}, {"message", "client fell behind and was dropped"}}}}, {}}));
    }
    json frames = json::array();
    std::uint64_t last = poll_since_;
    for (const auto& f : pending()) {
      frames.push_back(json::parse(f.text));
      last = std::max(last, f.seq);
    }
    send(json_response(poll_req_, {200, {{"client", poll_id_}, {"frames", std::move(frames)}, {"last_seq", last}}, {}}));
  }

  ListenerCore& impl_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  net::steady_timer poll_timer_;
  Request poll_req_;
  Hub::ClientId poll_id_ = 0;
  std::uint64_t poll_since_ = 0;
  bool busy_ = false;
  bool closing_ = false;
};

void ListenerCore::wake_poll(Hub::ClientId id) {
  std::shared_ptr<HttpSession> waiter;
  {
    std::lock_guard lock(poll_mu);
    const auto it = poll_clients.find(id);
    if (it != poll_clients.end()) waiter = it->second.waiter.lock();
  }
  if (waiter) net::post(waiter->executor(), [waiter] { waiter->wake(); });
}

void ListenerCore::do_accept() {
  // Handlers owned by ioc capture a raw pointer; stop() joins before the core dies.
  acceptor->async_accept(net::make_strand(ioc), [self = this](beast::error_code ec, tcp::socket socket) {
    if (self->stopping || !self->acceptor->is_open()) return;
    if (!ec) std::make_shared<HttpSession>(*self, std::move(socket))->start();
    self->do_accept();
  });
}

void ListenerCore::schedule_reap() {
  reaper->expires_after(std::chrono::seconds(1));
  reaper->async_wait([self = this](beast::error_code ec) {
    if (ec || self->stopping) return;
    const auto cutoff = std::chrono::steady_clock::now() - self->options.poll_idle_timeout;
    std::vector<Hub::ClientId> idle;
    {
      std::lock_guard lock(self->poll_mu);
      for (auto it = self->poll_clients.begin(); it != self->poll_clients.end();) {
        if (it->second.waiter.expired() && it->second.last_seen < cutoff) {
          idle.push_back(it->first);
          it = self->poll_clients.erase(it);
        } else {
          ++it;
        }
      }
    }
    for (auto id : idle) self->hub.detach(id);
    self->schedule_reap();
  });
}

Listener::Listener(Service& service, Hub& hub, ListenerOptions options)
    : impl_(std::make_shared<ListenerCore>(service, hub, std::move(options))) {}

Listener::~Listener() { stop(); }

void Listener::start() {
  auto& impl = *impl_;
  try {
    const tcp::endpoint endpoint(net::ip::make_address(impl.options.address), impl.options.port);
    impl.acceptor.emplace(net::make_strand(impl.ioc));
    impl.acceptor->open(endpoint.protocol());
    impl.acceptor->set_option(net::socket_base::reuse_address(true));
    impl.acceptor->bind(endpoint);
    impl.acceptor->listen(net::socket_base::max_listen_connections);
    impl.bound_port = impl.acceptor->local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    impl.acceptor.reset();
    throw Error(ErrorCode::Io, e.what(), impl.options.address + ":" + std::to_string(impl.options.port));
  }
  impl.reaper.emplace(impl.ioc);
  impl.do_accept();
  impl.schedule_reap();
  for (int i = 0; i < std::max(1, impl.options.threads); ++i) {
    impl.threads.emplace_back([&impl] { impl.ioc.run(); });
  }
}

std::uint16_t Listener::port() const { return impl_->bound_port; }

void Listener::stop() {
  auto& impl = *impl_;
  if (impl.threads.empty() || impl.stopping.exchange(true)) return;
  net::post(impl.ioc, [&impl] {
    beast::error_code ec;
    if (impl.acceptor) impl.acceptor->close(ec);
    if (impl.reaper) impl.reaper->cancel();
  });
  std::vector<std::shared_ptr<Connection>> open;
  {
    std::lock_guard lock(impl.connections_mu);
    for (auto& [ptr, weak] : impl.connections)
      if (auto c = weak.lock()) open.push_back(std::move(c));
  }
  for (auto& c : open) c->close();
  open.clear();

  // Give peers a moment to complete the close handshake.
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
  while (impl.open_connections() > 0 && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  impl.ioc.stop();
  for (auto& t : impl.threads) t.join();
  impl.threads.clear();
}

}  // namespace holomed::server
