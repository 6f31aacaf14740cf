#include <gtest/gtest.h>

#include <random>

#include "holomed/error.hpp"
#include "holomed/protocol/hub.hpp"
#include "holomed/protocol/latency.hpp"

using namespace holomed;
using namespace holomed::protocol;

namespace {

projection::FrameSchedule sample_schedule(std::int64_t tick) {
  projection::FrameSchedule s;
  s.tick = tick;
  s.sheet_id = 3;
  s.frame_index = static_cast<int>(tick % 40);
  s.fps = 25;
  for (std::size_t i = 0; i < 4; ++i) {
    s.faces[i] = {projection::kFaceOrder[i], projection::View::LateralRight, 40 + s.frame_index, s.frame_index,
                  i == 3, 1.0024};
  }
  return s;
}

std::vector<Message> one_of_each() {
  return {Hello{ClientRole::Projection, "abc"},
          Hello{ClientRole::Console, std::nullopt},
          GestureDetected{gesture::GestureKind::SwipeLeft, 742, gesture::DistanceStatus::InBand, true},
          AnswerEvaluated{session::Outcome::CaptureError, "Stand closer.", 4, "sid", 3},
          ScheduleUpdate{sample_schedule(77)},
          SpeakText{"Stage 2: descent"},
          ErrorNotice{"shutdown", "server stopping"},
          Ping{42},
          Pong{42, 1234}};
}

ErrorCode code_of(const std::function<void()>& fn, std::string* where = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (where) *where = e.where();
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

LatencySample sample(std::int64_t render, std::int64_t eval, int stage = 1) {
  LatencySample s;
  s.t_received = 1000;
  s.t_evaluated = 1000 + eval;
  s.t_broadcast = 1000 + render;
  s.stage_index = stage;
  return s;
}

}  // namespace

TEST(Codec, RoundTripsEveryType) {
  std::uint64_t seq = 1;
  for (const auto& m : one_of_each()) {
    const Envelope e{seq++, 99, m};
    EXPECT_EQ(decode(encode(e)), e) << encode(e);
  }
}

TEST(Codec, IgnoresUnknownFields) {
  const auto e = decode(
      R"({"type":"Hello","seq":1,"sent_ms":5,"extra":true,"payload":{"role":"Console","colour":"red"}})");
  EXPECT_EQ(e, (Envelope{1, 5, Hello{ClientRole::Console, std::nullopt}}));
}

TEST(Codec, RejectsBadInput) {
  std::string where;
  EXPECT_EQ(code_of([] { decode(R"({"type":"Shout","seq":1,"sent_ms":0,"payload":{}})"); }, &where),
            ErrorCode::Decode);
  EXPECT_EQ(where, "type");
  EXPECT_EQ(code_of([] { decode(R"({"type":"Ping","seq":0,"sent_ms":0,"payload":{"nonce":1}})"); }, &where),
            ErrorCode::Decode);
  EXPECT_EQ(where, "seq");
  EXPECT_EQ(code_of([] {
              decode(R"({"type":"GestureDetected","seq":1,"sent_ms":0,"payload":{"kind":"Wave",)"
                     R"("median_depth_mm":700,"status":"InBand","capture_ok":true}})");
            },
                    &where),
            ErrorCode::Decode);
  EXPECT_EQ(where, "payload.kind");
  EXPECT_EQ(code_of([] { decode(R"({"type":"Ping","seq":1,)"); }, &where), ErrorCode::Decode);
  EXPECT_EQ(where.rfind("byte ", 0), 0u);
  EXPECT_EQ(code_of([] { decode("[1,2]"); }), ErrorCode::Decode);
}

// Every strict prefix of every encoded envelope must fail cleanly.
TEST(Codec, TruncationFuzz) {
  std::size_t checked = 0;
  for (const auto& m : one_of_each()) {
    const std::string full = encode(Envelope{7, 1, m});
    for (std::size_t n = 0; n < full.size(); ++n) {
      try {
        decode(std::string_view(full).substr(0, n));
        ADD_FAILURE() << "prefix decoded: " << full.substr(0, n);
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::Decode);
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 500u);
}

TEST(Codec, ByteFlipFuzzNeverEscapes) {
  std::mt19937 rng(3);
  const auto messages = one_of_each();
  for (int i = 0; i < 5000; ++i) {
    std::string bytes = encode(Envelope{1, 1, messages[rng() % messages.size()]});
    for (int k = 0; k < 3; ++k) bytes[rng() % bytes.size()] = static_cast<char>(rng() % 256);
    try {
      decode(bytes);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::Decode) << bytes;
    }
  }
}

TEST(Codec, DirectionRules) {
  const Message gesture = GestureDetected{};
  EXPECT_TRUE(accepted_from(ClientRole::GestureSource, gesture));
  EXPECT_FALSE(accepted_from(ClientRole::Console, gesture));
  EXPECT_FALSE(accepted_from(ClientRole::Console, Message{ScheduleUpdate{}}));
  EXPECT_TRUE(accepted_from(ClientRole::Projection, Message{Ping{}}));
  EXPECT_FALSE(deliverable_to(ClientRole::GestureSource, Message{ScheduleUpdate{}}));
  EXPECT_TRUE(deliverable_to(ClientRole::Projection, Message{ScheduleUpdate{}}));
  EXPECT_TRUE(deliverable_to(ClientRole::GestureSource, Message{ErrorNotice{}}));
}

TEST(Latency, Examples) {
  const auto r = measure_latency({sample(40, 10), sample(50, 10), sample(48, 10)});
  ASSERT_TRUE(r.overall);
  EXPECT_DOUBLE_EQ(r.overall->gesture_to_render.avg, 46.0);
  EXPECT_EQ(r.overall->gesture_to_render.min, 40);
  EXPECT_EQ(r.overall->gesture_to_render.max, 50);

  const auto e = measure_latency({sample(80, 80), sample(80, 80), sample(80, 80)});
  EXPECT_DOUBLE_EQ(e.overall->gesture_to_eval.avg, 80.0);

  const auto one = measure_latency({sample(33, 12)});
  EXPECT_EQ(one.overall->gesture_to_render.min, one.overall->gesture_to_render.max);
  EXPECT_DOUBLE_EQ(one.overall->gesture_to_render.avg, 33.0);

  EXPECT_FALSE(measure_latency({}).overall);
  EXPECT_EQ(format_report({}), "no latency samples\n");
}

TEST(Latency, PerStage) {
  const auto r = measure_latency({sample(10, 1, 1), sample(20, 2, 1), sample(40, 4, 3)});
  ASSERT_EQ(r.per_stage.size(), 2u);
  EXPECT_DOUBLE_EQ(r.per_stage.at(1).gesture_to_render.avg, 15.0);
  EXPECT_DOUBLE_EQ(r.per_stage.at(3).gesture_to_eval.avg, 4.0);
  EXPECT_EQ(to_json(r)["per_stage"]["3"]["gesture_to_render"]["count"], 1);
  const auto text = format_report(r);
  EXPECT_NE(text.find("overall"), std::string::npos);
  EXPECT_EQ(latency_sample_from_json(to_json(sample(5, 2, 7))), sample(5, 2, 7));
}

TEST(Hub, BroadcastCounts) {
  Hub hub;
  EXPECT_EQ(hub.broadcast(ScheduleUpdate{sample_schedule(1)}, 0), 0u);
  for (int i = 0; i < 3; ++i) hub.attach(ClientRole::Projection, Transport::Stream);
  const auto source = hub.attach(ClientRole::GestureSource, Transport::Stream);
  EXPECT_EQ(hub.broadcast(ScheduleUpdate{sample_schedule(1)}, 0), 3u);
  EXPECT_EQ(hub.queue_depth(source), 0u);
  EXPECT_EQ(hub.broadcast(ErrorNotice{"shutdown", "bye"}, 0), 4u);
}

TEST(Hub, StalledClientIsDroppedOthersUnaffected) {
  Hub hub;
  int wakes = 0;
  const auto stalled = hub.attach(ClientRole::Projection, Transport::Stream, [&] { ++wakes; });
  const auto healthy = hub.attach(ClientRole::Projection, Transport::Stream);
  std::vector<std::uint64_t> seen;
  for (int i = 0; i < 300; ++i) {
    const auto n = hub.broadcast(ScheduleUpdate{sample_schedule(i)}, i);
    EXPECT_EQ(n, i < 256 ? 2u : 1u) << i;
    for (auto& f : hub.take(healthy)) seen.push_back(f.seq);
  }
  EXPECT_TRUE(hub.dropped(stalled));
  EXPECT_FALSE(hub.connected(stalled));
  EXPECT_EQ(hub.queue_depth(stalled), 0u);
  EXPECT_EQ(wakes, 2);  // first frame, then the drop
  ASSERT_EQ(seen.size(), 300u);
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i + 1);
  EXPECT_EQ(hub.client_count(), 1u);
}

TEST(Hub, SessionFilteringAndFifo) {
  Hub hub;
  const auto mine = hub.attach(ClientRole::Console, Transport::Stream, {}, "a");
  const auto all = hub.attach(ClientRole::Console, Transport::Stream);
  hub.broadcast(SpeakText{"1"}, 0, "a");
  hub.broadcast(SpeakText{"2"}, 0, "b");
  hub.broadcast(SpeakText{"3"}, 0);
  auto texts = [&](Hub::ClientId id) {
    std::vector<std::string> out;
    for (auto& f : hub.take(id)) out.push_back(std::get<SpeakText>(decode(f.text).payload).text);
    return out;
  };
  EXPECT_EQ(texts(mine), (std::vector<std::string>{"1", "3"}));
  EXPECT_EQ(texts(all), (std::vector<std::string>{"1", "2", "3"}));
}

TEST(Hub, DeliveryGroupFiresAfterLastWrite) {
  Hub hub;
  const auto a = hub.attach(ClientRole::Console, Transport::Stream);
  const auto b = hub.attach(ClientRole::Console, Transport::Stream);
  const auto p = hub.attach(ClientRole::Console, Transport::Poll);
  bool done = false;
  hub.broadcast(SpeakText{"x"}, 0, std::nullopt, std::make_shared<DeliveryGroup>([&] { done = true; }));
  auto fa = hub.take(a);
  EXPECT_FALSE(done);
  fa.clear();
  EXPECT_FALSE(done);
  hub.take(b).clear();
  EXPECT_TRUE(done);  // the poller never held the group
  EXPECT_EQ(hub.pending_after(p, 0).size(), 1u);

  bool empty_done = false;
  Hub lonely;
  lonely.broadcast(SpeakText{"x"}, 0, std::nullopt, std::make_shared<DeliveryGroup>([&] { empty_done = true; }));
  EXPECT_TRUE(empty_done);
}

TEST(Hub, PollAcknowledgesBySeq) {
  Hub hub;
  const auto p = hub.attach(ClientRole::Projection, Transport::Poll);
  for (int i = 0; i < 5; ++i) hub.broadcast(SpeakText{std::to_string(i)}, 0);
  auto batch = hub.pending_after(p, 0);
  ASSERT_EQ(batch.size(), 5u);
  EXPECT_EQ(hub.pending_after(p, 0).size(), 5u);  // lost response can be re-fetched
  batch = hub.pending_after(p, 3);
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_EQ(batch.front().seq, 4u);
  hub.detach(p);
  EXPECT_FALSE(hub.connected(p));
  EXPECT_TRUE(hub.pending_after(p, 0).empty());
}
