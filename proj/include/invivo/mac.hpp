#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "invivo/channel.hpp"
#include "invivo/frame.hpp"
#include "invivo/timebase.hpp"

namespace invivo {

struct CdwmOutcome {
  bool completed = true;
  std::uint32_t exit_index = 0;  // meaningful when !completed

  static CdwmOutcome done() { return {true, 0}; }
  static CdwmOutcome exited_at(std::uint32_t i) { return {false, i}; }
  friend bool operator==(const CdwmOutcome&, const CdwmOutcome&) = default;
};

// Bit-serial sender that listens while emitting zeros and goes silent for the rest
// of the frame once it hears a one.
class CdwmTransmitter {
 public:
  explicit CdwmTransmitter(BitString bits) : bits_(bits) {}

  const BitString& bits() const { return bits_; }
  bool exited() const { return exited_; }
  // Bit put on the channel at clock `index`; always 0 after an exit.
  bool emit(std::uint32_t index) const { return !exited_ && bits_.bit(index); }
  // Report the carrier observed at clock `index`. Only consulted while emitting 0.
  void sense(std::uint32_t index, bool carrier);
  bool finished(std::uint32_t clocks_elapsed) const {
    return exited_ || clocks_elapsed >= bits_.length;
  }
  CdwmOutcome outcome() const {
    return exited_ ? CdwmOutcome::exited_at(exit_index_) : CdwmOutcome::done();
  }

 private:
  BitString bits_;
  bool exited_ = false;
  std::uint32_t exit_index_ = 0;
};

// Reference model under full mutual visibility: indices of the senders holding the
// lexicographically greatest string. Throws InvalidArgument on an empty set or
// unequal lengths.
std::vector<std::size_t> arbitration_winner(std::span<const BitString> frames);

struct Contender {
  std::size_t node = 0;
  BitString bits;
  int pattern = 0;
};

struct ContentionResult {
  std::vector<CdwmOutcome> outcomes;  // per contender
  // Per node in the link table, the bits accumulated on each detector. Contenders
  // record nothing.
  std::vector<std::array<BitString, 2>> received;
};

// Runs one subcycle of bit-serial contention over the real channel.
ContentionResult run_contention(std::span<const Contender> contenders, const LinkTable& links);

// Binary exponential backoff in instruction cycles.
class Backoff {
 public:
  static constexpr std::uint32_t kMinWindow = 2;
  static constexpr std::uint32_t kMaxWindow = 16;

  std::uint32_t window() const { return window_; }
  std::uint32_t failures() const { return failures_; }
  // Draws a delay uniform in [1, window] and then doubles the window.
  std::uint32_t on_failure(Rng& rng);
  void on_success() {
    window_ = kMinWindow;
    failures_ = 0;
  }

 private:
  std::uint32_t window_ = kMinWindow;
  std::uint32_t failures_ = 0;
};

}  // namespace invivo
