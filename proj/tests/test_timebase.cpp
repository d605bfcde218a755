#include <gtest/gtest.h>

#include "invivo/errors.hpp"
#include "invivo/timebase.hpp"

namespace invivo {
namespace {

TEST(Subcycle, OriginIsT1) {
  const ClockConfig cfg;
  EXPECT_EQ(subcycle_of(0, cfg), (SubcyclePosition{Subcycle::T1, 0}));
}

TEST(Subcycle, SecondSubcycleStartsAtTwelve) {
  const ClockConfig cfg;
  EXPECT_EQ(cfg.subcycle_length(), 12u);
  EXPECT_EQ(subcycle_of(12, cfg), (SubcyclePosition{Subcycle::T2, 0}));
}

TEST(Subcycle, LastClockIsGuardOfT4) {
  const ClockConfig cfg;
  const auto pos = subcycle_of(47, cfg);
  EXPECT_EQ(pos, (SubcyclePosition{Subcycle::T4, 11}));
  EXPECT_TRUE(pos.is_guard(cfg));
}

TEST(Subcycle, MatchesDivisionOracleOverSeveralPeriods) {
  const ClockConfig cfg;
  for (std::uint64_t c = 0; c < 10 * 48; ++c) {
    const auto pos = subcycle_of(c, cfg);
    EXPECT_EQ(static_cast<std::uint64_t>(pos.subcycle), (c % 48) / 12);
    EXPECT_EQ(pos.offset, (c % 48) % 12);
  }
}

TEST(NonClock, ClassifiesGapLengths) {
  const ClockConfig cfg;
  EXPECT_EQ(detect_nonclock(0, cfg), NonClockEvent::none);
  EXPECT_EQ(detect_nonclock(7, cfg), NonClockEvent::none);
  EXPECT_EQ(detect_nonclock(8, cfg), NonClockEvent::frame_sync);
  EXPECT_EQ(detect_nonclock(40, cfg), NonClockEvent::mode_toggle);
}

TEST(ClockTracker, GapResynchronizesFramePhase) {
  ClockTracker tr{ClockConfig{}};
  tr.step(true);
  EXPECT_EQ(tr.frame_cycle(), 0u);
  for (int i = 0; i < 29; ++i) tr.step(true);
  EXPECT_EQ(tr.frame_cycle(), 29u);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(tr.step(false), NonClockEvent::none);
  EXPECT_EQ(tr.step(true), NonClockEvent::frame_sync);
  EXPECT_EQ(tr.frame_cycle(), 0u);
  EXPECT_EQ(tr.cycle(), 38u);
}

TEST(ClockConfig, RejectsBadValues) {
  ClockConfig c;
  c.g_mode = c.g_sync;
  EXPECT_THROW(c.validate(), InvalidArgument);
  ClockConfig d;
  d.bits_per_frame = 2;
  EXPECT_THROW(d.validate(), InvalidArgument);
}

std::uint64_t splitmix_finalizer(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

TEST(Rng, SingleValueBound) {
  Rng r(5, 3);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(r.next_below(1), 0u);
  EXPECT_THROW(r.next_below(0), InvalidArgument);
}

TEST(Rng, GoldenFirstDraw) {
  Rng r(1, 0);
  EXPECT_EQ(r.next_below(16), 7u);
}

TEST(Rng, MatchesCounterOracle) {
  const std::uint64_t g = 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t seed : {1ULL, 42ULL}) {
    for (std::uint64_t stream : {0ULL, 9ULL}) {
      Rng r(seed, stream);
      const std::uint64_t key = splitmix_finalizer(seed + g) ^ splitmix_finalizer(~stream * g);
      for (std::uint64_t n = 1; n <= 5; ++n) EXPECT_EQ(r.next_u64(), splitmix_finalizer(key + n * g));
    }
  }
}

TEST(Rng, SameSeedSameSequenceAndStreamsDiffer) {
  Rng a(11, 2), b(11, 2), c(11, 3);
  int differing = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_below(1000);
    EXPECT_EQ(x, b.next_below(1000));
    if (x != c.next_below(1000)) ++differing;
  }
  EXPECT_GT(differing, 90);
}

}  // namespace
}  // namespace invivo
