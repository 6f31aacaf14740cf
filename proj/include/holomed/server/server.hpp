#pragma once

#include <iosfwd>
#include <memory>

#include "holomed/server/config.hpp"
#include "holomed/server/service.hpp"

namespace holomed::server {

// The server role: store, sprite pack, listener and tick loop.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Opens the store (importing the seed into a store with no lessons), loads
  // the sprite pack (generating placeholders when the directory has no
  // manifest), binds the listener and starts the tick loop. If a stage
  // fails, the ones already started are torn down before the error
  // propagates.
  void start(std::ostream& log);

  // Broadcasts ErrorNotice{"shutdown"}, closes connections, stops the tick
  // loop and closes the store. Idempotent.
  void stop();

  std::uint16_t port() const;
  const ServerConfig& config() const;
  Service& service();
  store::DocumentStore& store();
  protocol::Hub& hub();

 private:
  struct Parts;
  ServerConfig config_;
  std::unique_ptr<Parts> parts_;
};

// Runs the server until SIGINT or SIGTERM. Prints one readiness line,
// "holomed listening on http://<addr>:<port>", once connections are
// accepted. Returns 0 after a clean stop and 2 when startup fails.
int serve(const ServerConfig& config, std::ostream& out, std::ostream& err);

}  // namespace holomed::server
