#pragma once

#include <cstdint>
#include <string_view>

namespace invivo {

// One instruction cycle is four subcycles; T1..T3 carry first-layer frames,
// T4 is reserved for second-layer fluorescence.
enum class Subcycle : std::uint8_t { T1 = 0, T2 = 1, T3 = 2, T4 = 3 };

std::string_view to_string(Subcycle s);

struct ClockConfig {
  static constexpr std::uint32_t kSubcyclesPerInstructionCycle = 4;

  std::uint32_t bits_per_frame = 11;
  std::uint32_t guard_bits = 1;
  double pulse_rate = 1e6;  // pulses per second; one bit per pulse
  std::uint32_t g_sync = 8;
  std::uint32_t g_mode = 32;

  std::uint32_t subcycle_length() const { return bits_per_frame + guard_bits; }
  std::uint32_t instruction_cycle_length() const {
    return kSubcyclesPerInstructionCycle * subcycle_length();
  }
  double seconds_per_cycle() const { return 1.0 / pulse_rate; }

  // Throws InvalidArgument on bits_per_frame < 3, g_sync == 0, g_mode <= g_sync
  // or a non-positive pulse rate.
  void validate() const;

  friend bool operator==(const ClockConfig&, const ClockConfig&) = default;
};

struct SubcyclePosition {
  Subcycle subcycle = Subcycle::T1;
  std::uint32_t offset = 0;  // clock index inside the subcycle

  bool is_guard(const ClockConfig& cfg) const { return offset >= cfg.bits_per_frame; }
  bool is_last_bit(const ClockConfig& cfg) const { return offset + 1 == cfg.bits_per_frame; }
  bool is_last_clock(const ClockConfig& cfg) const { return offset + 1 == cfg.subcycle_length(); }

  friend bool operator==(const SubcyclePosition&, const SubcyclePosition&) = default;
};

// Pure and periodic with period instruction_cycle_length().
SubcyclePosition subcycle_of(std::uint64_t frame_cycle, const ClockConfig& cfg);

enum class NonClockEvent : std::uint8_t { none, frame_sync, mode_toggle };

std::string_view to_string(NonClockEvent e);

// Classifies a run of missing laser pulses.
NonClockEvent detect_nonclock(std::uint32_t missing_run, const ClockConfig& cfg);

// Tracks the laser clock as seen by every node. The global cycle advances on every
// step whether or not a pulse arrived; the frame phase only advances on pulses and
// is reset to zero by the pulse that ends a frame_sync or mode_toggle gap.
class ClockTracker {
 public:
  explicit ClockTracker(ClockConfig cfg);

  // Advances one clock cycle. The returned event is reported on the first pulse
  // after a gap.
  NonClockEvent step(bool laser_on);

  std::uint64_t cycle() const { return cycle_; }
  bool laser_on() const { return laser_on_; }
  std::uint32_t missing_run() const { return missing_run_; }
  // Pulses since the last resynchronization, counting the current one.
  std::uint64_t frame_cycle() const { return frame_cycle_; }
  SubcyclePosition position() const { return subcycle_of(frame_cycle_, cfg_); }
  std::uint64_t instruction_cycle() const {
    return frame_cycle_ / cfg_.instruction_cycle_length();
  }
  const ClockConfig& config() const { return cfg_; }

 private:
  ClockConfig cfg_;
  std::uint64_t cycle_ = 0;
  std::uint64_t frame_cycle_ = 0;
  std::uint32_t missing_run_ = 0;
  bool laser_on_ = false;
  bool started_ = false;
};

// Counter-based generator: the value of draw n on (seed, stream) depends on
// nothing else, so per-node streams do not interfere with each other.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform in [0, bound). Throws InvalidArgument when bound == 0.
  std::uint64_t next_below(std::uint64_t bound);

  Rng substream(std::uint64_t stream) const { return Rng(seed_, stream); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t next_random(Rng& rng, std::uint64_t bound);

}  // namespace invivo
