#include "holomed/server/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "holomed/error.hpp"

namespace holomed::server {

namespace fs = std::filesystem;

namespace {

std::string line_of(const toml::node& node) { return "line " + std::to_string(node.source().begin.line); }

struct Value {
  const toml::node& node;

  [[noreturn]] void fail(const std::string& message) const { throw Error(ErrorCode::Config, message, line_of(node)); }

  std::string str() const {
    if (!node.is_string()) fail("expected a quoted string");
    return node.as_string()->get();
  }
  fs::path path(const fs::path& base) const {
    fs::path p = str();
    return p.empty() || p.is_absolute() || base.empty() ? p : base / p;
  }
  std::int64_t integer() const {
    if (!node.is_integer()) fail("expected an integer");
    return node.as_integer()->get();
  }
  double number() const {
    if (auto v = node.value<double>(); v && (node.is_integer() || node.is_floating_point())) return *v;
    fail("expected a number");
  }
  bool boolean() const {
    if (!node.is_boolean()) fail("expected true or false");
    return node.as_boolean()->get();
  }
};

using Setter = std::function<void(ServerConfig&, const Value&, const fs::path&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"server.listen", [](auto& c, const Value& v, auto&) { c.listen = v.str(); }},
      {"server.port",
       [](auto& c, const Value& v, auto&) {
         const auto p = v.integer();
         if (p < 0 || p > 65535) v.fail("port must be in 0..65535");
         c.port = static_cast<std::uint16_t>(p);
       }},
      {"server.static_dir", [](auto& c, const Value& v, const fs::path& b) { c.static_dir = v.path(b); }},
      {"server.presentation_ms", [](auto& c, const Value& v, auto&) { c.presentation_ms = static_cast<int>(v.integer()); }},
      {"server.io_threads", [](auto& c, const Value& v, auto&) { c.io_threads = static_cast<int>(v.integer()); }},
      {"store.dir", [](auto& c, const Value& v, const fs::path& b) { c.store_dir = v.path(b); }},
      {"store.seed", [](auto& c, const Value& v, const fs::path& b) { c.seed_file = v.path(b); }},
      {"assets.dir", [](auto& c, const Value& v, const fs::path& b) { c.assets_dir = v.path(b); }},
      {"gesture.gate_min_mm", [](auto& c, const Value& v, auto&) { c.pipeline.gate.gate_min = static_cast<int>(v.integer()); }},
      {"gesture.gate_max_mm", [](auto& c, const Value& v, auto&) { c.pipeline.gate.gate_max = static_cast<int>(v.integer()); }},
      {"gesture.band_min_mm", [](auto& c, const Value& v, auto&) { c.pipeline.gate.band_min = static_cast<int>(v.integer()); }},
      {"gesture.band_max_mm", [](auto& c, const Value& v, auto&) { c.pipeline.gate.band_max = static_cast<int>(v.integer()); }},
      {"gesture.threshold_px", [](auto& c, const Value& v, auto&) { c.pipeline.threshold_px = v.number(); }},
      {"gesture.window_ms", [](auto& c, const Value& v, auto&) { c.pipeline.window_ms = v.integer(); }},
      {"gesture.capture_failure_ms", [](auto& c, const Value& v, auto&) { c.pipeline.capture_failure_ms = v.integer(); }},
      {"projection.fps", [](auto& c, const Value& v, auto&) { c.fps = static_cast<int>(v.integer()); }},
      {"projection.monitor_diag_inches", [](auto& c, const Value& v, auto&) { c.monitor_diag_inches = v.number(); }},
      {"projection.face_phase_offset", [](auto& c, const Value& v, auto&) { c.face_phase_offset = v.boolean(); }},
      {"hologram.size_scale", [](auto& c, const Value& v, auto&) { c.hologram.size_scale = v.number(); }},
      {"hologram.intensity", [](auto& c, const Value& v, auto&) { c.hologram.intensity = v.number(); }},
      {"hologram.angle_deg", [](auto& c, const Value& v, auto&) { c.hologram.angle_deg = v.number(); }},
      {"hologram.rotation_period_ms",
       [](auto& c, const Value& v, auto&) { c.hologram.rotation_period_ms = static_cast<int>(v.integer()); }},
      {"replay.fixture", [](auto& c, const Value& v, const fs::path& b) { c.replay_fixture = v.path(b); }},
      {"replay.speed", [](auto& c, const Value& v, auto&) { c.replay_speed = v.number(); }},
  };
  return table;
}

}  // namespace

void ServerConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& message) { throw Error(ErrorCode::Config, message, key); };
  if (fps < projection::kMinFps || fps > projection::kMaxFps) fail("projection.fps", "must be in 25..30");
  if (io_threads < 1 || io_threads > 64) fail("server.io_threads", "must be in 1..64");
  if (presentation_ms < 0) fail("server.presentation_ms", "must not be negative");
  if (store_dir.empty()) fail("store.dir", "is required");
  if (assets_dir.empty()) fail("assets.dir", "is required");
  if (!seed_file.empty() && !fs::exists(seed_file)) fail("store.seed", "file not found: " + seed_file.string());
  if (!static_dir.empty() && !fs::is_directory(static_dir)) fail("server.static_dir", "not a directory");
  if (!replay_fixture.empty() && !fs::exists(replay_fixture)) fail("replay.fixture", "file not found");
  if (!(replay_speed > 0)) fail("replay.speed", "must be positive");
  if (!(monitor_diag_inches > 0)) fail("projection.monitor_diag_inches", "must be positive");
  if (pipeline.window_ms <= 0) fail("gesture.window_ms", "must be positive");
  try {
    pipeline.gate.validate();
  } catch (const Error& e) {
    fail("gesture", e.what());
  }
  try {
    store::hologram_options_from_json(store::to_json(hologram));
  } catch (const Error& e) {
    fail("hologram." + e.where(), e.what());
  }
}

ServerConfig parse_config(std::istream& in, const fs::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(in);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorCode::Config, std::string(e.description()), "line " + std::to_string(e.source().begin.line));
  }
  ServerConfig config;
  for (const auto& [name, node] : root) {
    const auto* section = node.as_table();
    if (!section) throw Error(ErrorCode::Config, "unknown key '" + std::string(name.str()) + "'", line_of(node));
    const std::string prefix = std::string(name.str()) + ".";
    const bool known = std::any_of(setters().begin(), setters().end(),
                                   [&](const auto& entry) { return entry.first.starts_with(prefix); });
    if (!known) throw Error(ErrorCode::Config, "unknown section [" + std::string(name.str()) + "]", line_of(node));
    for (const auto& [key, value] : *section) {
      const auto it = setters().find(prefix + std::string(key.str()));
      if (it == setters().end()) {
        throw Error(ErrorCode::Config, "unknown key '" + prefix + std::string(key.str()) + "'", line_of(value));
      }
      it->second(config, Value{value}, base_dir);
    }
  }
  return config;
}

ServerConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config file", path.string());
  ServerConfig config;
  try {
    config = parse_config(in, path.parent_path());
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what(), path.string() + ":" + e.where().substr(e.where().find(' ') + 1));
  }
  if (const char* store = std::getenv("HOLOMED_STORE"); store && *store) config.store_dir = store;
  return config;
}

std::string default_config_text() {
  const ServerConfig d;
  std::ostringstream out;
  out << "[server]\n"
      << "listen = \"" << d.listen << "\"\n"
      << "port = " << d.port << "\n"
      << "# static_dir = \"console/dist\"\n"
      << "presentation_ms = " << d.presentation_ms << "\n"
      << "io_threads = " << d.io_threads << "\n\n"
      << "[store]\n"
      << "dir = " << d.store_dir << "\n"
      << "# seed = \"data/seed.json\"\n\n"
      << "[assets]\n"
      << "dir = " << d.assets_dir << "\n\n"
      << "[gesture]\n"
      << "gate_min_mm = " << d.pipeline.gate.gate_min << "\n"
      << "gate_max_mm = " << d.pipeline.gate.gate_max << "\n"
      << "band_min_mm = " << d.pipeline.gate.band_min << "\n"
      << "band_max_mm = " << d.pipeline.gate.band_max << "\n"
      << "threshold_px = 0  # 0 = 25% of frame width\n"
      << "window_ms = " << d.pipeline.window_ms << "\n"
      << "capture_failure_ms = " << d.pipeline.capture_failure_ms << "\n\n"
      << "[projection]\n"
      << "fps = " << d.fps << "\n"
      << "monitor_diag_inches = " << d.monitor_diag_inches << "\n"
      << "face_phase_offset = " << (d.face_phase_offset ? "true" : "false") << "\n\n"
      << "[hologram]\n"
      << "size_scale = " << d.hologram.size_scale << "\n"
      << "intensity = " << d.hologram.intensity << "\n"
      << "angle_deg = " << d.hologram.angle_deg << "\n"
      << "rotation_period_ms = " << d.hologram.rotation_period_ms << "\n";
  return out.str();
}

}  // namespace holomed::server
