#include "invivo/timebase.hpp"

#include <string>

#include "invivo/errors.hpp"

namespace invivo {

std::string_view to_string(Subcycle s) {
  switch (s) {
    case Subcycle::T1: return "T1";
    case Subcycle::T2: return "T2";
    case Subcycle::T3: return "T3";
    case Subcycle::T4: return "T4";
  }
  return "?";
}

std::string_view to_string(NonClockEvent e) {
  switch (e) {
    case NonClockEvent::none: return "none";
    case NonClockEvent::frame_sync: return "frame_sync";
    case NonClockEvent::mode_toggle: return "mode_toggle";
  }
  return "?";
}

void ClockConfig::validate() const {
  if (bits_per_frame < 3) {
    throw InvalidArgument("bits_per_frame must be at least 3, got " +
                          std::to_string(bits_per_frame));
  }
  if (!(pulse_rate > 0.0)) throw InvalidArgument("pulse_rate must be positive");
  if (g_sync == 0) throw InvalidArgument("g_sync must be positive");
  if (g_mode <= g_sync) throw InvalidArgument("g_mode must exceed g_sync");
}

SubcyclePosition subcycle_of(std::uint64_t frame_cycle, const ClockConfig& cfg) {
  const std::uint64_t len = cfg.subcycle_length();
  const std::uint64_t in_frame = frame_cycle % cfg.instruction_cycle_length();
  return {static_cast<Subcycle>(in_frame / len), static_cast<std::uint32_t>(in_frame % len)};
}

NonClockEvent detect_nonclock(std::uint32_t missing_run, const ClockConfig& cfg) {
  if (missing_run >= cfg.g_mode) return NonClockEvent::mode_toggle;
  if (missing_run >= cfg.g_sync) return NonClockEvent::frame_sync;
  return NonClockEvent::none;
}

ClockTracker::ClockTracker(ClockConfig cfg) : cfg_(cfg) { cfg_.validate(); }

NonClockEvent ClockTracker::step(bool laser_on) {
  if (started_) ++cycle_;
  NonClockEvent event = NonClockEvent::none;
  if (!laser_on) {
    ++missing_run_;
  } else if (!started_) {
    frame_cycle_ = 0;
  } else if (missing_run_ > 0) {
    event = detect_nonclock(missing_run_, cfg_);
    frame_cycle_ = event == NonClockEvent::none ? frame_cycle_ + 1 : 0;
  } else {
    ++frame_cycle_;
  }
  if (laser_on) missing_run_ = 0;
  laser_on_ = laser_on;
  started_ = true;
  return event;
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(mix64(seed + kGolden) ^ mix64(~stream * kGolden)) {}

std::uint64_t Rng::next_u64() {
  const std::uint64_t n = counter_++;
  return mix64(key_ + (n + 1) * kGolden);
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("random bound must be at least 1");
  // Reject the low tail so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v >= threshold) return v % bound;
  }
}

std::uint64_t next_random(Rng& rng, std::uint64_t bound) { return rng.next_below(bound); }

}  // namespace invivo
