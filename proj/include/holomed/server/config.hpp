#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "holomed/gesture/pipeline.hpp"
#include "holomed/projection/schedule.hpp"
#include "holomed/store/schema.hpp"

namespace holomed::server {

struct ServerConfig {
  std::string listen = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  std::filesystem::path static_dir;  // console build output; empty serves a stub page
  int presentation_ms = 0;           // delay before a presented stage asks its question
  int io_threads = 2;

  std::filesystem::path store_dir = "var/store";
  std::filesystem::path seed_file;  // imported when the store has no lessons

  std::filesystem::path assets_dir = "var/assets";

  gesture::PipelineConfig pipeline;

  int fps = 25;
  double monitor_diag_inches = 21.0;
  bool face_phase_offset = false;  // faces 90° apart instead of in phase
  store::HologramOptions hologram;

  std::filesystem::path replay_fixture;
  double replay_speed = 1.0;

  // Throws Error{Config} naming the offending key.
  void validate() const;
};

// TOML with one level of `[section]` tables. Relative paths resolve against
// base_dir. Syntax errors, unknown keys and bad values throw Error{Config}
// with where() = "line N".
ServerConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});

// Reads the file, then applies the HOLOMED_STORE environment override.
ServerConfig load_config(const std::filesystem::path& path);

// The documented keys with their defaults, as a config file.
std::string default_config_text();

}  // namespace holomed::server
