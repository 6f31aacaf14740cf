#include "holomed/projection/tick_loop.hpp"

#include <chrono>
#include <thread>

namespace holomed::projection {

std::int64_t SteadyClock::now_us() {
  using namespace std::chrono;
  return duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count();
}

void SteadyClock::sleep_until_us(std::int64_t deadline_us) {
  using namespace std::chrono;
  // Timer wake-ups can land a few ms late on a busy host; sleep to just
  // short of the deadline and yield through the rest.
  constexpr std::int64_t kSpinUs = 1000;
  const auto at = [](std::int64_t us) {
    return steady_clock::time_point(duration_cast<steady_clock::duration>(microseconds(us)));
  };
  if (deadline_us - now_us() > kSpinUs) std::this_thread::sleep_until(at(deadline_us - kSpinUs));
  while (now_us() < deadline_us) std::this_thread::yield();
}

TickLoop::TickLoop(Clock& clock, const SpritePack& pack, ScheduleParams params, SheetSource sheet, Sink sink)
    : clock_(clock), pack_(pack), sheet_(std::move(sheet)), sink_(std::move(sink)), params_(params) {
  frame_index(0, params.fps, params.rotation_period_ms);  // validates
  params.geometry.validate();
}

void TickLoop::set_rotation(int rotation_period_ms, const PyramidGeometry& geometry) {
  std::lock_guard lock(params_mu_);
  frame_index(0, params_.fps, rotation_period_ms);
  geometry.validate();
  params_.rotation_period_ms = rotation_period_ms;
  params_.geometry = geometry;
}

ScheduleParams TickLoop::params() const {
  std::lock_guard lock(params_mu_);
  return params_;
}

std::int64_t TickLoop::tick_deadline_us(std::int64_t start_us, std::int64_t tick, int fps) {
  return start_us + (tick * 1'000'000 + fps - 1) / fps;
}

LoopEnd TickLoop::run(std::stop_token stop, std::optional<std::int64_t> max_schedules) {
  const int fps = params().fps;
  const std::int64_t start = clock_.now_us();
  std::int64_t last_tick = -1;
  std::int64_t emitted = 0;

  while (!stop.stop_requested()) {
    if (max_schedules && emitted >= *max_schedules) return LoopEnd::TickLimit;
    std::int64_t now = clock_.now_us();
    if ((now - start) * fps / 1'000'000 <= last_tick) {
      clock_.sleep_until_us(tick_deadline_us(start, last_tick + 1, fps));
      if (stop.stop_requested()) break;
      now = clock_.now_us();
    }
    const std::int64_t tick = std::max(last_tick + 1, (now - start) * fps / 1'000'000);
    last_tick = tick;
    const FrameSchedule schedule = make_schedule(pack_, sheet_(), tick, params());
    ++emitted;
    if (!sink_(schedule)) return LoopEnd::SinkGone;
  }
  return LoopEnd::Stopped;
}

}  // namespace holomed::projection
