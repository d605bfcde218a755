#include <gtest/gtest.h>

#include "invivo/errors.hpp"
#include "invivo/mac.hpp"

namespace invivo {
namespace {

// Two senders that hear each other perfectly over an OR channel.
std::pair<CdwmOutcome, CdwmOutcome> duel(BitString a, BitString b) {
  CdwmTransmitter ta(a), tb(b);
  for (std::uint32_t i = 0; i < a.length; ++i) {
    const bool ea = ta.emit(i), eb = tb.emit(i);
    ta.sense(i, eb);
    tb.sense(i, ea);
  }
  return {ta.outcome(), tb.outcome()};
}

TEST(Cdwm, SoleSenderCompletes) {
  CdwmTransmitter t(BitString::parse("0101"));
  for (std::uint32_t i = 0; i < 4; ++i) t.sense(i, t.emit(i));
  EXPECT_EQ(t.outcome(), CdwmOutcome::done());
}

TEST(Cdwm, LowerFrameExitsAtFirstDifference) {
  const auto [a, b] = duel(BitString::parse("10110000"), BitString::parse("10011111"));
  EXPECT_EQ(a, CdwmOutcome::done());
  EXPECT_EQ(b, CdwmOutcome::exited_at(2));
}

TEST(Cdwm, IdenticalFramesBothComplete) {
  const auto [a, b] = duel(BitString::parse("1100101"), BitString::parse("1100101"));
  EXPECT_TRUE(a.completed);
  EXPECT_TRUE(b.completed);
}

TEST(Cdwm, SilentAfterExit) {
  CdwmTransmitter t(BitString::parse("0111"));
  t.sense(0, true);
  EXPECT_TRUE(t.exited());
  for (std::uint32_t i = 1; i < 4; ++i) EXPECT_FALSE(t.emit(i));
}

TEST(Arbitration, Examples) {
  const std::vector<BitString> two{BitString::parse("111000"), BitString::parse("101111")};
  EXPECT_EQ(arbitration_winner(two), std::vector<std::size_t>{0});
  const std::vector<BitString> one{BitString::parse("0010")};
  EXPECT_EQ(arbitration_winner(one), std::vector<std::size_t>{0});
  const std::vector<BitString> tie{BitString::parse("01"), BitString::parse("10"), BitString::parse("10")};
  EXPECT_EQ(arbitration_winner(tie), (std::vector<std::size_t>{1, 2}));
  EXPECT_THROW(arbitration_winner(std::vector<BitString>{}), InvalidArgument);
  const std::vector<BitString> mixed{BitString::parse("01"), BitString::parse("011")};
  EXPECT_THROW(arbitration_winner(mixed), InvalidArgument);
}

TEST(Arbitration, BlockBeatsEveryCommand) {
  const FrameFormat fmt{4};
  const BitString block = encode(block_frame(0b1001, fmt), fmt);
  for (Address r = 0; r < 16; ++r) {
    for (Address t = 0; t < 16; ++t) {
      const std::vector<BitString> v{encode({r, Opcode::COMMAND, t}, fmt), block};
      EXPECT_EQ(arbitration_winner(v), std::vector<std::size_t>{1});
    }
  }
}

TEST(Backoff, WindowGrowthAndReset) {
  Rng rng(4, 0);
  Backoff b;
  for (int i = 0; i < 200; ++i) {
    Backoff fresh;
    const auto d = fresh.on_failure(rng);
    EXPECT_GE(d, 1u);
    EXPECT_LE(d, 2u);
  }
  b.on_failure(rng);
  b.on_failure(rng);
  b.on_failure(rng);
  EXPECT_EQ(b.window(), 16u);
  for (int i = 0; i < 200; ++i) {
    Backoff copy = b;
    const auto d = copy.on_failure(rng);
    EXPECT_GE(d, 1u);
    EXPECT_LE(d, 16u);
    EXPECT_EQ(copy.window(), 16u);
  }
  b.on_success();
  EXPECT_EQ(b.window(), Backoff::kMinWindow);
  EXPECT_LE(b.on_failure(rng), 2u);
}

TEST(Backoff, FourthWindowCoversFullRange) {
  Rng rng(9, 1);
  std::vector<int> seen(17, 0);
  for (int i = 0; i < 4000; ++i) {
    Backoff b;
    b.on_failure(rng);
    b.on_failure(rng);
    b.on_failure(rng);
    ++seen[b.on_failure(rng)];
  }
  for (int d = 1; d <= 16; ++d) EXPECT_GT(seen[d], 0) << d;
}

}  // namespace
}  // namespace invivo
