#include "holomed/server/server.hpp"

#include <csignal>
#include <fstream>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "holomed/error.hpp"
#include "holomed/projection/tick_loop.hpp"
#include "holomed/server/listener.hpp"
#include "holomed/store/catalog.hpp"

namespace holomed::server {

namespace fs = std::filesystem;

namespace {

projection::PyramidGeometry geometry_for(const store::HologramOptions& options, double monitor_diag_inches) {
  return {options.angle_deg, monitor_diag_inches};
}

}  // namespace

struct Server::Parts {
  protocol::Hub hub;
  std::optional<store::DocumentStore> store;
  std::optional<Service> service;
  projection::SpritePack pack;
  std::optional<Listener> listener;
  projection::SteadyClock clock;
  std::optional<projection::TickLoop> tick_loop;
  std::jthread tick_thread;
  bool stopped = false;
};

Server::Server(ServerConfig config) : config_(std::move(config)), parts_(std::make_unique<Parts>()) {}

Server::~Server() { stop(); }

void Server::start(std::ostream& log) {
  config_.validate();
  auto& p = *parts_;
  try {
    p.store.emplace(config_.store_dir);
    if (!config_.seed_file.empty() && p.store->count(store::Collection::Lessons) == 0) {
      std::ifstream in(config_.seed_file);
      if (!in) throw Error(ErrorCode::Config, "cannot open seed file", config_.seed_file.string());
      store::Json seed;
      try {
        seed = store::Json::parse(in);
      } catch (const store::Json::parse_error& e) {
        throw Error(ErrorCode::Parse, "malformed seed", config_.seed_file.string() + " byte " + std::to_string(e.byte));
      }
      const auto n = store::import_documents(*p.store, seed);
      log << fmt::format("imported {} documents from {}\n", n, config_.seed_file.string());
    }

    if (!p.store->find(store::Collection::HologramOptions, store::kDefaultDocId)) {
      p.store->put(store::Collection::HologramOptions, std::string(store::kDefaultDocId), store::to_json(config_.hologram));
    }

    if (!fs::exists(config_.assets_dir / "manifest.json")) {
      projection::generate_placeholder_pack(config_.assets_dir);
      log << fmt::format("generated placeholder sprite sheets in {}\n", config_.assets_dir.string());
    }
    p.pack = projection::load_sprite_pack(config_.assets_dir);

    p.service.emplace(*p.store, p.hub, ServiceOptions{config_.presentation_ms});
    p.listener.emplace(*p.service, p.hub,
                       ListenerOptions{config_.listen, config_.port, config_.io_threads, config_.static_dir,
                                       config_.assets_dir});
    p.listener->start();

    const auto hologram = store::active_hologram_options(*p.store);
    projection::ScheduleParams params{config_.fps, hologram.rotation_period_ms,
                                      geometry_for(hologram, config_.monitor_diag_inches), config_.face_phase_offset};
    p.tick_loop.emplace(
        p.clock, p.pack, params, [&p] { return p.service->current_sheet(); },
        [&p](const projection::FrameSchedule& s) {
          p.hub.broadcast(protocol::ScheduleUpdate{s}, monotonic_ms());
          return true;
        });
    const double monitor = config_.monitor_diag_inches;
    p.service->on_hologram_change([&p, monitor](const store::HologramOptions& o) {
      p.tick_loop->set_rotation(o.rotation_period_ms, geometry_for(o, monitor));
    });
    p.tick_thread = std::jthread([&p](std::stop_token st) { p.tick_loop->run(st); });
  } catch (...) {
    stop();
    throw;
  }
}

void Server::stop() {
  auto& p = *parts_;
  if (p.stopped) return;
  p.stopped = true;
  if (p.tick_thread.joinable()) {
    p.tick_thread.request_stop();
    p.tick_thread.join();
  }
  if (p.service) p.service->on_hologram_change({});
  if (p.listener) {
    p.hub.broadcast(protocol::ErrorNotice{"shutdown", "The server is shutting down."}, monotonic_ms());
    p.listener->stop();
  }
  if (p.service) p.service->shutdown();
  if (p.store) p.store->close();
}

std::uint16_t Server::port() const { return parts_->listener ? parts_->listener->port() : 0; }
const ServerConfig& Server::config() const { return config_; }
Service& Server::service() { return *parts_->service; }
store::DocumentStore& Server::store() { return *parts_->store; }
protocol::Hub& Server::hub() { return parts_->hub; }

int serve(const ServerConfig& config, std::ostream& out, std::ostream& err) {
  // Block the signals before any thread starts so every thread inherits
  // the mask and sigwait below is the only receiver.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Server server(config);
  try {
    server.start(out);
  } catch (const Error& e) {
    err << "startup failed: " << e.what() << (e.where().empty() ? "" : " (" + e.where() + ")") << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "startup failed: " << e.what() << '\n';
    return 2;
  }
  out << fmt::format("holomed listening on http://{}:{}", config.listen, server.port()) << std::endl;

  int received = 0;
  sigwait(&signals, &received);
  out << "received " << (received == SIGINT ? "SIGINT" : "SIGTERM") << ", shutting down" << std::endl;
  server.stop();
  return 0;
}

}  // namespace holomed::server
