#include <gtest/gtest.h>

#include <httplib.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "holomed/gesture/synthetic.hpp"
#include "holomed/server/replay.hpp"
#include "holomed/server/ws_client.hpp"
#include "support/running_server.hpp"

using namespace holomed;
using namespace holomed::server;
using namespace std::chrono_literals;
using gesture::GestureKind;
using nlohmann::json;

namespace {

std::string start_session(httplib::Client& http) {
  const auto res = http.Post("/api/sessions", R"({"student_id":"s1","lesson_id":"L"})", "application/json");
  EXPECT_TRUE(res);
  EXPECT_EQ(res->status, 201) << res->body;
  return json::parse(res->body)["session"]["session_id"];
}

std::string random_bytes(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> byte(0, 255);
  std::string s(len(rng), '\0');
  for (auto& c : s) c = static_cast<char>(byte(rng));
  return s;
}

// Flips, truncates or splices a valid document.
std::string mutate(std::mt19937_64& rng, std::string s) {
  std::uniform_int_distribution<int> op(0, 3);
  std::uniform_int_distribution<std::size_t> pos(0, s.empty() ? 0 : s.size() - 1);
  switch (op(rng)) {
    case 0: if (!s.empty()) s[pos(rng)] = static_cast<char>(rng() & 0xff); break;
    case 1: s.resize(pos(rng)); break;
    case 2: s.insert(pos(rng), random_bytes(rng, 8)); break;
    case 3: if (!s.empty()) s.erase(pos(rng), 1 + rng() % 4); break;
  }
  return s;
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    files[std::filesystem::relative(e.path(), root).string()] = body.str();
  }
  return files;
}

ServerConfig config_in(const fixtures::TempDir& dir) {
  const auto seed_path = dir.path() / "seed.json";
  if (!std::filesystem::exists(seed_path)) std::ofstream(seed_path) << fixtures::lesson_seed("L", "s1").dump();
  ServerConfig config;
  config.port = 0;
  config.store_dir = dir.path() / "store";
  config.assets_dir = dir.path() / "assets";
  config.seed_file = seed_path;
  return config;
}

}  // namespace

TEST(Robustness, MalformedRequestsNeverTakeTheServerDown) {
  fixtures::RunningServer s;
  httplib::Client http("127.0.0.1", s.port());
  http.set_read_timeout(5, 0);
  start_session(http);

  const std::string gesture =
      protocol::encode({1, 0, protocol::GestureDetected{GestureKind::SwipeRight, 750, gesture::DistanceStatus::InBand, true}});
  const std::vector<std::pair<std::string, std::string>> valid = {
      {"/api/gestures", gesture},
      {"/api/sessions", R"({"student_id":"s1","lesson_id":"L"})"},
      {"/api/questions", R"({"lesson_id":"L","stage":1,"prompt":"p","correct":true,"order":9})"},
      {"/api/hologram_options/default", R"({"size_scale":1.0,"intensity":0.8,"angle_deg":46,"rotation_period_ms":1600})"},
      {"/api/lessons/L/validate", "{}"},
  };
  const char* methods[] = {"GET", "POST", "PUT", "DELETE", "PATCH"};

  std::mt19937_64 rng(20261016);
  for (int i = 0; i < 400; ++i) {
    const auto& [path, body] = valid[rng() % valid.size()];
    httplib::Request req;
    req.method = methods[rng() % std::size(methods)];
    req.path = (rng() % 5 == 0) ? path + "/" + mutate(rng, "x%2Fy") : path;
    req.body = (rng() % 4 == 0) ? random_bytes(rng, 64) : mutate(rng, body);
    req.set_header("Content-Type", "application/json");
    const auto res = http.send(req);
    ASSERT_TRUE(res) << "request " << i << " dropped: " << req.method << " " << req.path;
    EXPECT_LT(res->status, 500) << req.method << " " << req.path << " " << res->body;
  }

  // Text frames must be UTF-8 to reach the decoder at all.
  auto ascii = [](std::string t) {
    for (auto& c : t) c = static_cast<unsigned char>(c) < 0x80 ? c : '?';
    return t;
  };
  WsClient source("127.0.0.1", s.port(), protocol::ClientRole::GestureSource);
  for (int i = 0; i < 200; ++i) source.send_text(ascii(i % 3 == 0 ? random_bytes(rng, 48) : mutate(rng, gesture)));
  source.send(protocol::Ping{7});
  const auto pong = source.receive_until(
      [](const protocol::Envelope& e) { return std::holds_alternative<protocol::Pong>(e.payload); }, 5s);
  EXPECT_TRUE(pong);

  WsClient broken("127.0.0.1", s.port(), protocol::ClientRole::GestureSource);
  broken.send_text("{\"type\":\"\xff\xfe\"}");
  for (int i = 0; i < 200 && !broken.closed(); ++i) std::this_thread::sleep_for(10ms);
  EXPECT_EQ(broken.close_code(), 1007);

  const auto health = http.Get("/api/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
}

TEST(Robustness, RestartWithoutWritesLeavesStoreUnchanged) {
  fixtures::TempDir dir;
  const auto config = config_in(dir);
  std::ostringstream log;
  {
    Server first(config);
    first.start(log);
  }
  const auto before = read_tree(config.store_dir);
  ASSERT_FALSE(before.empty());
  {
    Server second(config);
    second.start(log);
    EXPECT_EQ(log.str().find("imported", log.str().find("imported") + 1), std::string::npos);
  }
  EXPECT_EQ(read_tree(config.store_dir), before);
}

TEST(Robustness, StoppedServerLeavesReadableJournal) {
  fixtures::TempDir dir;
  const auto config = config_in(dir);
  std::ostringstream log;
  std::string sid;
  {
    Server server(config);
    server.start(log);
    httplib::Client http("127.0.0.1", server.port());
    sid = start_session(http);
    const auto body = protocol::payload_json(
                          protocol::GestureDetected{GestureKind::SwipeRight, 750, gesture::DistanceStatus::InBand, true})
                          .dump();
    for (int i = 0; i < 3; ++i) ASSERT_TRUE(http.Post("/api/gestures", body, "application/json"));
    server.stop();
  }
  store::DocumentStore reopened(config.store_dir);
  const auto doc = reopened.find(store::Collection::Sessions, sid);
  ASSERT_TRUE(doc);
  EXPECT_EQ(session::session_state_from_json(doc->body).score, 1);
  EXPECT_EQ(reopened.count(store::Collection::LatencySamples), 3u);
}

class Replay : public ::testing::Test {
 protected:
  void SetUp() override {
    http_.emplace("127.0.0.1", s_.port());
    start_session(*http_);
  }
  ReplayOptions options(double speed) const {
    ReplayOptions o;
    o.port = s_.port();
    o.speed = speed;
    return o;
  }

  fixtures::RunningServer s_;
  std::optional<httplib::Client> http_;
};

TEST_F(Replay, OneCleanSwipeSubmitsOneEvent) {
  gesture::synthetic::SwipeSpec spec;
  spec.direction = GestureKind::SwipeRight;
  const auto frames = gesture::synthetic::swipe_sequence({}, spec);
  const auto summary = replay(frames, options(0));
  EXPECT_EQ(summary.frames, frames.size());
  EXPECT_EQ(summary.events, 1u);
  EXPECT_EQ(summary.kinds, (std::map<std::string, std::size_t>{{"SwipeRight", 1}}));
  EXPECT_EQ(summary.http_statuses, (std::map<int, std::size_t>{{200, 1}}));
}

TEST_F(Replay, OutOfGateFixtureSubmitsNothing) {
  gesture::synthetic::Pose pose;
  pose.depth_mm = 2000;  // beyond the 1500 mm gate
  const auto frames = gesture::synthetic::still_sequence({}, pose, 60);
  const auto summary = replay(frames, options(0));
  EXPECT_EQ(summary.events, 0u);
  EXPECT_TRUE(summary.http_statuses.empty());
  EXPECT_EQ(summary.statuses, (std::map<std::string, std::size_t>{{"OutOfGate", frames.size()}}));
}

TEST_F(Replay, SpeedScalesWallTime) {
  gesture::synthetic::Pose pose;
  auto frames = gesture::synthetic::still_sequence({}, pose, 20, 33);
  gesture::synthetic::SwipeSpec spec;
  spec.direction = GestureKind::SwipeLeft;
  spec.start_ms = frames.back().timestamp_ms + 33;
  const auto swipe = gesture::synthetic::swipe_sequence({}, spec);
  frames.insert(frames.end(), swipe.begin(), swipe.end());

  auto timed = [&](double speed) {
    const auto t0 = std::chrono::steady_clock::now();
    auto summary = replay(frames, options(speed));
    return std::pair(summary, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  };
  const auto [normal, normal_ms] = timed(1.0);
  const auto [fast, fast_ms] = timed(2.0);
  EXPECT_EQ(normal.kinds, fast.kinds);
  EXPECT_EQ(normal.statuses, fast.statuses);
  const double span = static_cast<double>(frames.back().timestamp_ms - frames.front().timestamp_ms);
  EXPECT_GE(normal_ms, span);
  EXPECT_GE(fast_ms, span / 2);
  EXPECT_NEAR(fast_ms / normal_ms, 0.5, 0.1);
}
