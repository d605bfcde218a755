#include <gtest/gtest.h>

#include "invivo/errors.hpp"
#include "invivo/frame.hpp"

namespace invivo {
namespace {

const FrameFormat kFmt{4};

std::uint64_t mask_of(std::initializer_list<Address> addrs) {
  std::uint64_t m = 0;
  for (Address a : addrs) m |= 1ULL << a;
  return m;
}

TEST(Frame, NotifyLayout) {
  const Frame f{0b1000, Opcode::NOTIFY, 0b0000};
  EXPECT_EQ(format_bits(f, kFmt), "1000 101 0000");
  EXPECT_EQ(encode(f, kFmt), BitString::parse("10001010000"));
}

TEST(Frame, BlockHasSevenLeadingOnes) {
  const Frame f = block_frame(0b1000, kFmt);
  EXPECT_EQ(format_bits(f, kFmt), "1111 111 1000");
  const BitString b = encode(f, kFmt);
  for (std::uint32_t i = 0; i < 7; ++i) EXPECT_TRUE(b.bit(i));
  EXPECT_FALSE(b.bit(8));
}

TEST(Frame, RoundTripAllFramesAtWidthTwo) {
  const FrameFormat fmt{2};
  for (std::uint32_t w = 0; w < (1U << fmt.length()); ++w) {
    const BitString b{w, fmt.length()};
    EXPECT_EQ(encode(parse_frame(b, fmt), fmt), b);
  }
  EXPECT_THROW(parse_frame(BitString{0, 6}, fmt), InvalidArgument);
}

TEST(Frame, ReservedAddressesAndRoles) {
  EXPECT_EQ(kFmt.broadcast(), 0b1111);
  EXPECT_EQ(kFmt.controller(), 0b1110);
  EXPECT_TRUE(kFmt.is_actuator(0b1000));
  EXPECT_FALSE(kFmt.is_actuator(0b0111));
  EXPECT_EQ(kFmt.parse_address("1010"), 0b1010);
  EXPECT_FALSE(kFmt.parse_address("101").has_value());
  EXPECT_THROW((FrameFormat{7}.validate()), InvalidArgument);
}

TEST(Frame, PositionIdSpansBothAddressFields) {
  for (std::uint32_t id : {0u, 3u, 18u, 255u}) {
    const Frame f = position_frame(id, kFmt);
    EXPECT_EQ(f.opcode, Opcode::POSN);
    EXPECT_EQ(position_of(f, kFmt), id);
  }
}

TEST(Frame, OpcodeNames) {
  for (int v = 0; v < 8; ++v) {
    const auto op = static_cast<Opcode>(v);
    EXPECT_EQ(opcode_from_string(to_string(op)), op);
  }
  EXPECT_GT(static_cast<int>(Opcode::BLOCK), static_cast<int>(Opcode::ACK));
}

TEST(Decode, UnknownTransmitterIsCollisionSuspect) {
  const Address a1 = 0b1000;
  const auto physical = mask_of({0b0000, 0b0001, 0b1001});
  const auto r = decode_verify(BitString::parse("1000 101 0100"), a1, physical, kFmt);
  EXPECT_EQ(r.status, DecodeStatus::collision_suspect);
  EXPECT_EQ(r.frame.transmitter, 0b0100);
}

TEST(Decode, AcceptsNeighborBroadcastAndController) {
  const Address a1 = 0b1000;
  const auto physical = mask_of({0b0000});
  EXPECT_TRUE(decode_verify(BitString::parse("1000 101 0000"), a1, physical, kFmt).ok());
  EXPECT_TRUE(decode_verify(BitString::parse("1111 111 0000"), a1, physical, kFmt).ok());
  EXPECT_TRUE(decode_verify(BitString::parse("1000 110 1110"), a1, physical, kFmt).ok());
}

TEST(Decode, OtherRecipientIsNotForMeButKeepsFields) {
  const auto r = decode_verify(BitString::parse("0001 110 1000"), 0b0000, mask_of({0b1000}), kFmt);
  EXPECT_EQ(r.status, DecodeStatus::not_for_me);
  EXPECT_EQ(r.frame.opcode, Opcode::ACK);
  EXPECT_EQ(r.frame.transmitter, 0b1000);
}

TEST(BitString, OrderIsLexicographic) {
  EXPECT_LT(BitString::parse("0111"), BitString::parse("1000"));
  EXPECT_EQ(bitwise_or(BitString::parse("1010"), BitString::parse("0110")), BitString::parse("1110"));
  EXPECT_EQ(BitString::parse("10 1").str(), "101");
}

}  // namespace
}  // namespace invivo
