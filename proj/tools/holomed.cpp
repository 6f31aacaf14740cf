// holomed command line: server and client roles plus asset/fixture tools.

#include <csignal>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <httplib.h>

#include "holomed/error.hpp"
#include "holomed/gesture/fixture.hpp"
#include "holomed/gesture/synthetic.hpp"
#include "holomed/projection/sprites.hpp"
#include "holomed/server/config.hpp"
#include "holomed/server/replay.hpp"
#include "holomed/server/server.hpp"
#include "holomed/server/ws_client.hpp"

using namespace holomed;

namespace {

struct Address {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
};

Address parse_address(std::string text) {
  if (text.starts_with("http://")) text.erase(0, 7);
  if (!text.empty() && text.back() == '/') text.pop_back();
  Address a;
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) {
    if (!text.empty()) a.host = text;
    return a;
  }
  if (colon > 0) a.host = text.substr(0, colon);
  try {
    const int port = std::stoi(text.substr(colon + 1));
    if (port < 1 || port > 65535) throw std::out_of_range("port");
    a.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidInput, "bad port in '" + text + "'", "--server");
  }
  return a;
}

std::string describe(const Error& e) {
  return e.where().empty() ? e.what() : fmt::format("{} ({})", e.what(), e.where());
}

int run_replay(const std::filesystem::path& fixture, const Address& addr, double speed,
               std::optional<std::string> session, const gesture::PipelineConfig& pipeline) {
  const auto frames = gesture::read_depth_sequence(fixture);
  server::ReplayOptions options{addr.host, addr.port, speed, std::move(session), pipeline};
  const auto summary = server::replay(frames, options);
  std::cout << server::format_summary(summary);
  return summary.http_statuses.count(0) ? 1 : 0;
}

// Projection role: follows the schedule stream and prints one line per
// second until interrupted.
int run_projection(const Address& addr) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  server::WsClient client(addr.host, addr.port, protocol::ClientRole::Projection);
  std::atomic<bool> done{false};
  std::thread reader([&] {
    auto last_print = std::chrono::steady_clock::now();
    std::size_t count = 0;
    while (!done) {
      const auto env = client.receive(std::chrono::milliseconds(200));
      if (!env) {
        if (client.closed()) break;
        continue;
      }
      if (const auto* notice = std::get_if<protocol::ErrorNotice>(&env->payload)) {
        std::cout << "notice " << notice->code << ": " << notice->text << std::endl;
      } else if (const auto* u = std::get_if<protocol::ScheduleUpdate>(&env->payload)) {
        ++count;
        if (std::chrono::steady_clock::now() - last_print >= std::chrono::seconds(1)) {
          const auto& s = u->schedule;
          std::cout << fmt::format("tick {} sheet {} frame {} ({} schedules)", s.tick, s.sheet_id,
                                   s.is_final() ? std::string("final") : std::to_string(s.frame_index), count)
                    << std::endl;
          last_print = std::chrono::steady_clock::now();
          count = 0;
        }
      }
    }
    // Wake sigwait when the server goes away first.
    if (!done) ::kill(::getpid(), SIGTERM);
  });
  int received = 0;
  sigwait(&signals, &received);
  done = true;
  reader.join();
  client.close();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HoloMed holographic delivery-training server and tools"};
  app.require_subcommand(1);

  std::filesystem::path config_path = "holomed.toml";
  std::string role = "server";
  auto* serve = app.add_subcommand("serve", "Run one role of the system");
  serve->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  serve->add_option("--role", role, "server, gesture or projection")
      ->check(CLI::IsMember({"server", "gesture", "projection"}));

  std::filesystem::path fixture;
  std::string server_addr = "127.0.0.1:8080";
  double speed = 1.0;
  std::string session;
  auto* replay = app.add_subcommand("replay", "Feed a recorded depth sequence to a running server");
  replay->add_option("--fixture", fixture, "Depth sequence file")->required()->check(CLI::ExistingFile);
  replay->add_option("--server", server_addr, "host:port");
  replay->add_option("--speed", speed, "Playback speed, 0 for no pauses")->check(CLI::NonNegativeNumber);
  replay->add_option("--session", session, "Session id (default: the active session)");

  std::filesystem::path out_dir;
  int cell = 64;
  auto* gen_assets = app.add_subcommand("gen-assets", "Write placeholder sprite sheets and manifest");
  gen_assets->add_option("--out", out_dir, "Output directory")->required();
  gen_assets->add_option("--cell", cell, "Cell size in pixels")->check(CLI::Range(16, 512));

  std::filesystem::path fixture_out;
  std::string kind = "SwipeRight";
  int noise = 0;
  std::uint64_t seed = 1;
  auto* gen_fixture = app.add_subcommand("gen-fixture", "Write a synthetic swipe depth sequence");
  gen_fixture->add_option("--out", fixture_out, "Output file")->required();
  gen_fixture->add_option("--kind", kind, "SwipeRight or SwipeLeft")->check(CLI::IsMember({"SwipeRight", "SwipeLeft"}));
  gen_fixture->add_option("--noise", noise, "Uniform depth noise amplitude in mm")->check(CLI::Range(0, 200));
  gen_fixture->add_option("--seed", seed, "RNG seed");

  bool as_json = false;
  auto* report = app.add_subcommand("latency-report", "Print the server's latency report");
  report->add_option("--server", server_addr, "host:port");
  report->add_flag("--json", as_json, "Raw JSON instead of the table");

  app.add_subcommand("print-config", "Print a config file with every key at its default");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      const auto config = server::load_config(config_path);
      if (role == "server") return server::serve(config, std::cout, std::cerr);
      const Address addr{config.listen == "0.0.0.0" ? "127.0.0.1" : config.listen, config.port};
      if (role == "projection") return run_projection(addr);
      if (config.replay_fixture.empty()) {
        std::cerr << "gesture role needs replay.fixture in the config\n";
        return 2;
      }
      return run_replay(config.replay_fixture, addr, config.replay_speed, std::nullopt, config.pipeline);
    }
    if (*replay) {
      return run_replay(fixture, parse_address(server_addr), speed,
                        session.empty() ? std::nullopt : std::optional(session), {});
    }
    if (*gen_assets) {
      const auto pack = projection::generate_placeholder_pack(out_dir, cell);
      std::cout << fmt::format("wrote {} sheets to {}\n", pack.sheets.size(), out_dir.string());
      return 0;
    }
    if (*gen_fixture) {
      std::mt19937_64 rng(seed);
      const gesture::synthetic::Scene scene;
      const auto direction = kind == "SwipeRight" ? gesture::GestureKind::SwipeRight : gesture::GestureKind::SwipeLeft;
      auto frames = gesture::synthetic::swipe_sequence(scene, gesture::synthetic::random_swipe(rng, direction, scene));
      if (noise > 0)
        for (auto& f : frames) gesture::synthetic::add_uniform_noise(f, noise, rng);
      gesture::write_depth_sequence(fixture_out, frames);
      std::cout << fmt::format("wrote {} frames to {}\n", frames.size(), fixture_out.string());
      return 0;
    }
    if (*report) {
      const auto addr = parse_address(server_addr);
      httplib::Client http(addr.host, addr.port);
      const auto res = http.Get(as_json ? "/api/latency" : "/api/latency?format=text");
      if (!res) {
        std::cerr << "cannot reach " << addr.host << ':' << addr.port << '\n';
        return 1;
      }
      std::cout << res->body << (as_json ? "\n" : "");
      return res->status == 200 ? 0 : 1;
    }
    std::cout << server::default_config_text();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << describe(e) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
