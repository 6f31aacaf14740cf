#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <stop_token>

#include "holomed/projection/sprites.hpp"

namespace holomed::projection {

// Microsecond monotonic clock; injectable so schedules can be replayed.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_us() = 0;
  virtual void sleep_until_us(std::int64_t deadline_us) = 0;
};

class SteadyClock final : public Clock {
 public:
  std::int64_t now_us() override;
  void sleep_until_us(std::int64_t deadline_us) override;
};

// Time only moves when someone sleeps or calls advance().
class VirtualClock final : public Clock {
 public:
  std::int64_t now_us() override { return now_; }
  void sleep_until_us(std::int64_t deadline_us) override { now_ = std::max(now_, deadline_us); }
  void advance_us(std::int64_t delta) { now_ += delta; }

 private:
  std::int64_t now_ = 0;
};

enum class LoopEnd { Stopped, SinkGone, TickLimit };

// Emits one FrameSchedule per tick at the configured fps. The tick number
// is derived from elapsed time, so a slow sink makes the loop skip ahead
// instead of replaying stale frames.
class TickLoop {
 public:
  using SheetSource = std::function<int()>;
  // Returns false once the consumer is gone for good.
  using Sink = std::function<bool(const FrameSchedule&)>;

  TickLoop(Clock& clock, const SpritePack& pack, ScheduleParams params, SheetSource sheet, Sink sink);

  LoopEnd run(std::stop_token stop, std::optional<std::int64_t> max_schedules = std::nullopt);

  // Takes effect from the next tick. fps is fixed for the life of the loop.
  void set_rotation(int rotation_period_ms, const PyramidGeometry& geometry);
  ScheduleParams params() const;

  static std::int64_t tick_deadline_us(std::int64_t start_us, std::int64_t tick, int fps);

 private:
  Clock& clock_;
  const SpritePack& pack_;
  SheetSource sheet_;
  Sink sink_;
  mutable std::mutex params_mu_;
  ScheduleParams params_;
};

}  // namespace holomed::projection
