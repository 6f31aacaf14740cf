// Acceptance run: one PASS/FAIL line per primary criterion, exit status 1
// if any fails.
//
//   acceptance [--only <substring>]
//   acceptance --store-child <dir> <ops>   (internal, durability worker)

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <thread>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <fmt/format.h>
#include <httplib.h>

#include "holomed/error.hpp"
#include "holomed/gesture/contour.hpp"
#include "holomed/gesture/pipeline.hpp"
#include "holomed/gesture/synthetic.hpp"
#include "holomed/projection/sprites.hpp"
#include "holomed/projection/tick_loop.hpp"
#include "holomed/protocol/latency.hpp"
#include "holomed/server/replay.hpp"
#include "holomed/server/server.hpp"
#include "holomed/server/ws_client.hpp"
#include "holomed/store/document_store.hpp"
#include "support/lessons.hpp"
#include "support/oracles.hpp"
#include "support/seed.hpp"
#include "support/tempdir.hpp"

using namespace holomed;
using namespace std::chrono_literals;
using gesture::GestureKind;
using store::Collection;
using store::Json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------- latency

Verdict latency() {
  constexpr int kSubmissions = 200;
  constexpr int kPerStage = kSubmissions / session::kStageCount;

  fixtures::TempDir dir;
  std::ofstream(dir.path() / "seed.json") << fixtures::lesson_seed("L", "s1", kPerStage).dump();
  server::ServerConfig config;
  config.port = 0;
  config.store_dir = dir.path() / "store";
  config.assets_dir = dir.path() / "assets";
  config.seed_file = dir.path() / "seed.json";
  server::Server srv(config);
  std::ostringstream log;
  srv.start(log);

  httplib::Client http("127.0.0.1", srv.port());
  const auto started = http.Post("/api/sessions", R"({"student_id":"s1","lesson_id":"L"})", "application/json");
  if (!started || started->status != 201) return {false, "could not start a session"};
  const std::string sid = Json::parse(started->body)["session"]["session_id"];

  std::vector<std::unique_ptr<server::WsClient>> clients;
  clients.push_back(std::make_unique<server::WsClient>("127.0.0.1", srv.port(), protocol::ClientRole::Console));
  clients.push_back(std::make_unique<server::WsClient>("127.0.0.1", srv.port(), protocol::ClientRole::Console, sid));
  clients.push_back(std::make_unique<server::WsClient>("127.0.0.1", srv.port(), protocol::ClientRole::Projection));
  std::atomic<bool> reading{true};
  std::vector<std::thread> readers;
  std::atomic<std::size_t> evaluations{0};
  for (auto& c : clients) {
    readers.emplace_back([&, client = c.get()] {
      while (reading) {
        if (auto env = client->receive(50ms); env && std::holds_alternative<protocol::AnswerEvaluated>(env->payload)) {
          ++evaluations;
        }
      }
    });
  }

  // One recorded swipe per question, directions matching the answers, so the
  // run walks every stage.
  const auto lesson = fixtures::make_lesson("L", kPerStage);
  std::mt19937_64 rng(46);
  const gesture::synthetic::Scene scene;
  std::vector<gesture::DepthFrame> frames;
  gesture::TimestampMs t = 0;
  for (const auto& q : lesson.questions) {
    auto spec = gesture::synthetic::random_swipe(rng, fixtures::answer_kind(q.correct), scene);
    spec.start_ms = t;
    auto part = gesture::synthetic::swipe_sequence(scene, spec);
    t = part.back().timestamp_ms + spec.frame_ms;
    frames.insert(frames.end(), part.begin(), part.end());
  }
  server::ReplayOptions options;
  options.port = srv.port();
  options.speed = 8.0;
  options.session_id = sid;
  const auto summary = server::replay(frames, options);

  std::vector<protocol::LatencySample> samples;
  for (int i = 0; i < 200; ++i) {
    samples = srv.service().latency_samples();
    if (samples.size() >= summary.events) break;
    std::this_thread::sleep_for(10ms);
  }
  reading = false;
  for (auto& r : readers) r.join();
  const auto state = srv.service().session_state(sid);
  clients.clear();
  srv.stop();

  const auto report = protocol::measure_latency(samples);
  std::cout << protocol::format_report(report);
  if (summary.events != kSubmissions) {
    return {false, fmt::format("replay produced {} submissions, wanted {}", summary.events, kSubmissions)};
  }
  if (!report.overall || report.overall->gesture_to_render.count != kSubmissions) {
    return {false, fmt::format("{} latency samples closed, wanted {}", samples.size(), kSubmissions)};
  }
  const double render = report.overall->gesture_to_render.avg;
  const double eval = report.overall->gesture_to_eval.avg;
  const bool ok = render <= 46.0 && eval <= 80.0 && summary.http_statuses.at(200) == kSubmissions &&
                  state->phase == session::Phase::Finished && state->score == kSubmissions &&
                  report.per_stage.size() == session::kStageCount;
  return {ok, fmt::format("gesture_to_render avg {:.2f} ms (<= 46), gesture_to_eval avg {:.2f} ms (<= 80), "
                          "{} samples over {} stages, score {}, {} AnswerEvaluated frames read by 3 clients",
                          render, eval, report.overall->gesture_to_render.count, report.per_stage.size(),
                          state->score, evaluations.load())};
}

// ------------------------------------------------------------- frame rate

Verdict frame_rate() {
  fixtures::TempDir dir;
  const auto pack = projection::generate_placeholder_pack(dir.path(), 16);
  std::string detail;
  bool ok = true;
  for (int fps : {25, 30}) {
    projection::SteadyClock clock;
    std::vector<std::int64_t> at;
    std::vector<projection::FrameSchedule> got;
    at.reserve(300);
    projection::TickLoop loop(clock, pack, {fps, projection::kDefaultRotationPeriodMs, {}}, [] { return 3; },
                              [&](const projection::FrameSchedule& s) {
                                at.push_back(clock.now_us());
                                got.push_back(s);
                                return true;
                              });
    loop.run({}, 300);
    const double period_us = 1e6 / fps;
    double worst = 0;
    bool consecutive = got.size() == 300;
    for (std::size_t i = 1; i < at.size(); ++i) {
      worst = std::max(worst, std::abs((at[i] - at[i - 1]) - period_us) / period_us);
      consecutive &= got[i].tick == got[i - 1].tick + 1;
    }
    // Ticks per rotation at the default period: 40 at 25 fps, 48 at 30 fps.
    const int period_ticks = fps * projection::kDefaultRotationPeriodMs / 1000;
    bool periodic = true;
    for (std::size_t i = 0; i + period_ticks < got.size(); ++i) {
      periodic &= got[i + period_ticks].frame_index == got[i].frame_index;
    }
    for (int period_ms : {400, 1000, 1600, 2000, 3600}) {
      if (fps * period_ms % 1000) continue;
      const int p = fps * period_ms / 1000;
      for (std::int64_t tick = 0; tick < 3000; ++tick) {
        periodic &= projection::frame_index(tick + p, fps, period_ms) == projection::frame_index(tick, fps, period_ms);
      }
    }
    ok &= worst <= 0.10 && consecutive && periodic;
    detail += fmt::format("{}fps: {} ticks, worst jitter {:.1f}%, periodic {}; ", fps, got.size(), worst * 100,
                          periodic ? "yes" : "no");
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// ----------------------------------------------------------------- sheets

Verdict sprite_sheets() {
  fixtures::TempDir dir;
  projection::generate_placeholder_pack(dir.path(), 32);
  const auto pack = projection::load_sprite_pack(dir.path());
  int total = 0;
  for (const auto& s : pack.sheets) total += s.frame_count;

  const auto manifest = Json::parse(std::ifstream(dir.path() / "manifest.json"));
  const std::vector<std::function<void(Json&, const std::filesystem::path&)>> mutilations{
      [](Json& j, auto&) { j["sheets"].erase(4); },
      [](Json& j, auto&) { j["sheets"][2]["frame_count"] = 39; },
      [](Json& j, auto&) { j["sheets"][3]["sheet_id"] = 2; },
      [](Json& j, auto&) { j["sheets"][2]["final"] = true; },
      [](Json& j, auto&) { j["sheets"][7]["final"] = false; },
      [](Json& j, auto&) { j["sheets"][1]["views"].erase("Posterior"); },
      [](Json& j, auto&) { j["sheets"][0]["file"] = "absent.png"; },
      [](Json& j, auto&) {
        auto extra = j["sheets"][0];
        extra["sheet_id"] = 9;
        j["sheets"].push_back(extra);
      },
      [](Json&, const std::filesystem::path& d) { std::filesystem::resize_file(d / "sheet5.png", 100); },
      [](Json& j, auto&) { j.erase("sheets"); },
  };
  int rejected = 0;
  for (const auto& mutate : mutilations) {
    fixtures::TempDir copy;
    std::filesystem::copy(dir.path(), copy.path());
    auto j = manifest;
    mutate(j, copy.path());
    std::ofstream(copy.path() / "manifest.json") << j.dump();
    try {
      projection::load_sprite_pack(copy.path());
    } catch (const Error& e) {
      rejected += e.code() == ErrorCode::Asset;
    }
  }
  const bool ok = pack.sheets.size() == 8 && total == 281 && rejected == static_cast<int>(mutilations.size());
  return {ok, fmt::format("{} sheets, {} frames, {}/{} mutilated manifests rejected", pack.sheets.size(), total,
                          rejected, mutilations.size())};
}

// ------------------------------------------------------------ perspective

Verdict perspective() {
  using Big = boost::multiprecision::cpp_dec_float_50;
  auto factor = [](double angle) { return projection::perspective_factor({angle, 21.0}); };
  const Big pi = boost::multiprecision::acos(Big(-1));
  const Big oracle = 1 / boost::multiprecision::cos(Big(4) * pi / 180);
  const double at45 = factor(45.0);
  const double err47 = std::abs(factor(47.0) - oracle.convert_to<double>());
  double worst_sym = 0;
  for (int i = 1; i < 500; ++i) {
    const double d = i * 0.00999;
    worst_sym = std::max(worst_sym, std::abs(factor(45.0 + d) - factor(45.0 - d)));
  }
  const bool ok = at45 == 1.0 && err47 <= 1e-9 && worst_sym <= 1e-12;
  return {ok, fmt::format("factor(45) = {:.17g}, |factor(47) - oracle| = {:.3g}, worst asymmetry {:.3g}", at45, err47,
                          worst_sym)};
}

// ---------------------------------------------------------------- gesture

// Independent 3x3 median: valid readings in the window, lower median.
std::vector<std::uint16_t> median_oracle(const gesture::DepthFrame& f) {
  std::vector<std::uint16_t> out(f.samples.size(), 0);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) {
      if (!f.at(x, y)) continue;
      std::vector<std::uint16_t> w;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx >= 0 && ny >= 0 && nx < f.width && ny < f.height && f.at(nx, ny)) w.push_back(f.at(nx, ny));
        }
      std::sort(w.begin(), w.end());
      out[static_cast<std::size_t>(y) * f.width + x] = w[(w.size() - 1) / 2];
    }
  return out;
}

gesture::DepthFrame random_scene(std::mt19937_64& rng) {
  const int w = std::uniform_int_distribution<int>(8, 32)(rng);
  const int h = std::uniform_int_distribution<int>(8, 32)(rng);
  const std::array<std::uint16_t, 3> background{0, 250, 2600};
  gesture::DepthFrame f(w, h, 0, background[rng() % 3]);
  const int rects = std::uniform_int_distribution<int>(1, 7)(rng);
  for (int r = 0; r < rects; ++r) {
    const int x0 = std::uniform_int_distribution<int>(0, w - 1)(rng);
    const int y0 = std::uniform_int_distribution<int>(0, h - 1)(rng);
    const int x1 = std::uniform_int_distribution<int>(x0, std::min(w - 1, x0 + w / 2))(rng);
    const int y1 = std::uniform_int_distribution<int>(y0, std::min(h - 1, y0 + h / 2))(rng);
    const auto depth = static_cast<std::uint16_t>(std::uniform_int_distribution<int>(300, 1700)(rng));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) f.at(x, y) = depth;
  }
  std::bernoulli_distribution speck(0.05);
  for (auto& v : f.samples)
    if (speck(rng)) v = static_cast<std::uint16_t>(std::uniform_int_distribution<int>(0, 2000)(rng));
  return f;
}

struct SwipeScore {
  int correct = 0;
  int opposite = 0;
};

SwipeScore classify_swipes(std::uint64_t seed, int trials, int noise_mm) {
  std::mt19937_64 rng(seed);
  const gesture::synthetic::Scene scene;
  SwipeScore score;
  for (int i = 0; i < trials; ++i) {
    const auto dir = i % 2 ? GestureKind::SwipeLeft : GestureKind::SwipeRight;
    const auto other = i % 2 ? GestureKind::SwipeRight : GestureKind::SwipeLeft;
    auto frames = gesture::synthetic::swipe_sequence(scene, gesture::synthetic::random_swipe(rng, dir, scene));
    gesture::GesturePipeline pipeline;
    int hits = 0, wrong = 0;
    for (auto& f : frames) {
      if (noise_mm) gesture::synthetic::add_uniform_noise(f, noise_mm, rng);
      const auto r = pipeline.process(f);
      if (!r.event || !r.event->capture_ok) continue;
      hits += r.event->kind == dir;
      wrong += r.event->kind != dir;
      score.opposite += r.event->kind == other;
    }
    score.correct += hits == 1 && wrong == 0;
  }
  return score;
}

Verdict gesture_oracles() {
  std::mt19937_64 rng(500);
  const gesture::GateConfig gate;
  int masks = 0, segment_ok = 0, contour_ok = 0, nonempty = 0;
  for (; masks < 500; ++masks) {
    const auto frame = random_scene(rng);
    const auto mask = gesture::segment_user(frame, gate);
    const auto expected =
        oracle::largest_component(frame.width, frame.height, median_oracle(frame), gate.gate_min, gate.gate_max);
    segment_ok += mask.bits == expected;
    if (mask.empty()) {
      ++contour_ok;
      continue;
    }
    ++nonempty;
    std::set<std::pair<int, int>> traced;
    const auto contour = gesture::trace_contour(mask);
    bool chained = true;
    for (std::size_t i = 0; i < contour.points.size(); ++i) {
      const auto a = contour.points[i], b = contour.points[(i + 1) % contour.points.size()];
      traced.insert({a.x, a.y});
      chained &= std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1;
    }
    contour_ok += chained && traced == oracle::exterior_border_set(mask);
  }
  const auto clean = classify_swipes(100, 100, 0);
  const auto noisy = classify_swipes(120, 100, 20);
  const bool ok = segment_ok == masks && contour_ok == masks && clean.correct == 100 && noisy.correct >= 90 &&
                  noisy.opposite == 0 && clean.opposite == 0;
  return {ok, fmt::format("segmentation {}/{} and contour {}/{} ({} non-empty) match oracles; clean swipes {}/100; "
                          "noisy ±20 mm {}/100 with {} opposite",
                          segment_ok, masks, contour_ok, masks, nonempty, clean.correct, noisy.correct,
                          noisy.opposite)};
}

// ----------------------------------------------------------------- gating

Verdict distance_gating() {
  const gesture::synthetic::Scene scene;
  const std::vector<std::pair<int, gesture::DistanceStatus>> cases{{500, gesture::DistanceStatus::TooClose},
                                                                   {750, gesture::DistanceStatus::InBand},
                                                                   {1200, gesture::DistanceStatus::TooFar}};
  bool ok = true;
  std::string detail;
  for (const auto& [depth, want] : cases) {
    gesture::synthetic::Pose pose;
    pose.depth_mm = depth;
    const auto frames = gesture::synthetic::still_sequence(scene, pose, 5);
    gesture::GesturePipeline pipeline;
    bool all = true;
    gesture::Millimeters median = 0;
    for (const auto& f : frames) {
      const auto r = pipeline.process(f);
      all &= r.status == want && gesture::distance_status(gesture::segment_user(f, {}), {}) == want;
      median = r.median_depth_mm;
    }
    ok &= all;
    detail += fmt::format("{} mm -> {} (median {}); ", depth,
                          all ? std::string(gesture::to_string(want)) : std::string("mismatch"), median);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// ---------------------------------------------------------------- session

session::SessionState scripted_lesson(const session::LessonCatalog& catalog) {
  auto s = session::start_session(catalog, "s1", "L", "scripted", 1000);
  const auto binding = session::GestureBinding::defaults();
  session::MonotonicMs now = 1000;
  while (s.state().phase != session::Phase::Finished) {
    if (s.state().phase == session::Phase::Presenting) s.advance(now += 10);
    const auto* q = s.lesson().question(*s.state().current_question);
    s.submit_gesture(fixtures::answer_kind(q->correct), binding, now += 250);
  }
  return s.state();
}

Verdict session_machine() {
  fixtures::MemoryCatalog catalog;
  catalog.students.insert("s1");
  catalog.lessons.emplace("L", fixtures::make_lesson("L", 1));

  const auto first = scripted_lesson(catalog);
  int answers = 0;
  for (const auto& e : first.log) answers += e.event == "correct" || e.event == "incorrect";
  const auto second = scripted_lesson(catalog);
  const auto log_a = session::export_log(first);
  const auto log_b = session::export_log(second);
  const auto reloaded = session::session_state_from_json(Json::parse(session::to_json(first).dump()));
  const bool deterministic = log_a == log_b && session::export_log(reloaded) == log_a;

  // Failures 1 and 2 stay silent, 3 reports; a recognised gesture resets.
  auto s = session::start_session(catalog, "s1", "L", "capture", 0);
  std::vector<bool> fired;
  for (int i = 0; i < 3; ++i) fired.push_back(s.record_capture_failure(i).has_value());
  const auto third = s.record_capture_failure(10);
  s.record_capture_failure(11);
  s.submit_gesture(GestureKind::RaiseBoth, session::GestureBinding::defaults(), 12);
  const bool reset = !s.record_capture_failure(13) && !s.record_capture_failure(14) && s.record_capture_failure(15);
  const bool capture_ok = fired == std::vector<bool>{false, false, true} && !third && reset;

  const bool ok = first.phase == session::Phase::Finished && first.score == 8 && answers == 8 && deterministic &&
                  capture_ok;
  return {ok, fmt::format("finished {} with score {} after {} answers; CaptureError on attempt 3 {}; "
                          "log replay {} ({} bytes)",
                          first.phase == session::Phase::Finished ? "yes" : "no", first.score, answers,
                          capture_ok ? "yes" : "no", deterministic ? "byte-exact" : "differs", log_a.size())};
}

// ------------------------------------------------------------------ store

struct Op {
  bool remove = false;
  Collection collection = Collection::Questions;
  std::string id;
  Json body;
};

std::vector<Op> make_ops(std::size_t n) {
  std::mt19937_64 rng(1000);
  std::vector<Op> ops;
  for (std::size_t i = 0; i < n; ++i) {
    Op op;
    const bool question = rng() % 4 != 0;
    op.collection = question ? Collection::Questions : Collection::Teachers;
    op.id = fmt::format("{}{}", question ? "q" : "t", rng() % (question ? 120 : 30));
    op.remove = rng() % 10 < 3;
    if (!op.remove) {
      if (question) {
        op.body = {{"lesson_id", std::string(1, static_cast<char>('A' + rng() % 3))},
                   {"stage_index", 1 + static_cast<int>(rng() % 8)},
                   {"prompt", fmt::format("prompt {}", i)},
                   {"correct", rng() % 2 == 0}};
        if (rng() % 2) op.body["hint"] = fmt::format("hint {}", i);
      } else {
        op.body = {{"name", fmt::format("teacher {}", i)}};
      }
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

struct Expected {
  Json body;
  std::uint64_t revision = 0;
};
using OracleState = std::map<std::pair<Collection, std::string>, Expected>;

OracleState apply(const std::vector<Op>& ops, std::size_t count) {
  OracleState state;
  for (std::size_t i = 0; i < count; ++i) {
    const auto key = std::make_pair(ops[i].collection, ops[i].id);
    if (ops[i].remove) {
      state.erase(key);
    } else {
      const auto previous = state.count(key) ? state[key].revision : 0;
      state[key] = {ops[i].body, previous + 1};
    }
  }
  return state;
}

bool matches(const store::DocumentStore& store, const OracleState& expected) {
  std::size_t seen = 0;
  for (auto c : {Collection::Questions, Collection::Teachers}) {
    for (const auto& d : store.list(c)) {
      const auto it = expected.find({c, d.id});
      if (it == expected.end() || it->second.body != d.body || it->second.revision != d.revision) return false;
      ++seen;
    }
  }
  return seen == expected.size();
}

int store_child(const std::filesystem::path& dir, std::size_t n) {
  const auto ops = make_ops(n);
  store::DocumentStore store(dir);
  for (std::size_t i = 0; i < n; ++i) {
    if (ops[i].remove) {
      store.remove(ops[i].collection, ops[i].id);
    } else {
      store.put(ops[i].collection, ops[i].id, ops[i].body);
    }
    std::printf("%zu\n", i + 1);
    std::fflush(stdout);
  }
  ::pause();
  return 0;
}

// Runs the worker and SIGKILLs it once it has acknowledged `kill_after` ops.
std::size_t run_and_kill(const std::filesystem::path& dir, std::size_t total, std::size_t kill_after) {
  int fds[2];
  if (::pipe(fds) != 0) throw std::runtime_error("pipe failed");
  const std::string self = std::filesystem::read_symlink("/proc/self/exe").string();
  const std::string n = std::to_string(total);
  const pid_t pid = ::fork();
  if (pid == 0) {
    ::dup2(fds[1], STDOUT_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    ::execl(self.c_str(), self.c_str(), "--store-child", dir.c_str(), n.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  FILE* in = ::fdopen(fds[0], "r");
  std::size_t acked = 0;
  char line[64];
  while (acked < kill_after && std::fgets(line, sizeof line, in)) acked = std::strtoull(line, nullptr, 10);
  ::kill(pid, SIGKILL);
  ::waitpid(pid, nullptr, 0);
  std::fclose(in);
  return acked;
}

Verdict store_durability() {
  constexpr std::size_t kOps = 1000;
  const auto ops = make_ops(kOps);

  // Killed mid-run: every acknowledged op survives; the in-flight one may.
  fixtures::TempDir partial;
  const auto acked_partial = run_and_kill(partial.path(), kOps, 613);
  bool partial_ok;
  {
    store::DocumentStore reopened(partial.path());
    partial_ok = matches(reopened, apply(ops, acked_partial)) || matches(reopened, apply(ops, acked_partial + 1));
  }

  fixtures::TempDir full;
  const auto acked = run_and_kill(full.path(), kOps, kOps);
  store::DocumentStore reopened(full.path());
  const auto expected = apply(ops, kOps);
  const bool full_ok = acked == kOps && matches(reopened, expected);

  std::vector<Json> filters{Json::object()};
  for (const char* lesson : {"A", "B", "C", "Z"}) filters.push_back({{"lesson_id", lesson}});
  for (int s = 1; s <= 8; ++s) filters.push_back({{"stage_index", s}});
  for (bool c : {true, false}) filters.push_back({{"correct", c}, {"lesson_id", "B"}});
  filters.push_back({{"stage_index", 3}, {"lesson_id", "A"}, {"correct", true}});
  filters.push_back({{"hint", nullptr}});
  int filters_ok = 0;
  for (const auto& filter : filters) {
    std::vector<std::string> got, want;
    for (const auto& d : reopened.list(Collection::Questions, filter)) got.push_back(d.id);
    for (const auto& [key, e] : expected) {
      if (key.first != Collection::Questions) continue;
      bool match = true;
      for (const auto& [k, v] : filter.items()) match &= e.body.contains(k) && e.body[k] == v;
      if (match) want.push_back(key.second);
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    filters_ok += got == want;
  }
  const bool ok = partial_ok && full_ok && filters_ok == static_cast<int>(filters.size());
  return {ok, fmt::format("killed after {} ops: {}; killed after {} ops: {} documents {}; {}/{} filters match "
                          "linear scan",
                          acked_partial, partial_ok ? "recovered" : "MISMATCH", acked, expected.size(),
                          full_ok ? "recovered" : "MISMATCH", filters_ok, filters.size())};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 4 && std::string_view(argv[1]) == "--store-child") {
    return store_child(argv[2], std::stoul(argv[3]));
  }
  std::string only;
  if (argc == 3 && std::string_view(argv[1]) == "--only") only = argv[2];

  // Durability forks, so it runs before anything starts threads.
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"store durability", store_durability},
      {"perspective correction", perspective},
      {"spritesheet arithmetic", sprite_sheets},
      {"distance gating", distance_gating},
      {"gesture oracle suite", gesture_oracles},
      {"session machine", session_machine},
      {"frame-rate contract", frame_rate},
      {"latency at desk scale", latency},
  };
  bool all = true;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && name.find(only) == std::string::npos) continue;
    Verdict v;
    try {
      v = check();
    } catch (const Error& e) {
      v = {false, fmt::format("error: {} {}", e.what(), e.where())};
    } catch (const std::exception& e) {
      v = {false, fmt::format("error: {}", e.what())};
    }
    all &= v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
