#include <gtest/gtest.h>

#include "invivo/node.hpp"

namespace invivo {
namespace {

const FrameFormat kFmt{4};
constexpr Address kSensor = 0b0000;
constexpr Address kOther = 0b0001;
constexpr Address kActuator = 0b1000;

NodeMemory memory_for(Address self, std::initializer_list<Address> physical,
                      std::initializer_list<Address> recognized = {}) {
  NodeMemory m(self, kFmt);
  for (Address a : physical) {
    m.physical |= 1ULL << a;
    m.optimal_pattern[a] = 2;
  }
  for (Address a : recognized) m.recognized |= 1ULL << a;
  return m;
}

FirstLayerNode make(Address self, std::initializer_list<Address> physical,
                    std::initializer_list<Address> recognized = {},
                    ProtocolVariant protocol = ProtocolVariant::handshake) {
  NodeParams p;
  p.format = kFmt;
  p.protocol = protocol;
  p.on_detect = DetectAction::command_recognized;
  return FirstLayerNode("n" + kFmt.address_str(self), memory_for(self, physical, recognized), p,
                        Rng(1, self + 1));
}

ReceivedFrame heard(const FirstLayerNode& n, const Frame& f) {
  const auto& m = n.memory();
  return {decode_verify(encode(f, kFmt), m.self, m.physical, kFmt), DetectorSide::top};
}

void receive(FirstLayerNode& n, std::uint64_t ic, std::vector<ReceivedFrame> frames) {
  n.end_receiving_subcycle({ic * 48, ic}, frames);
}

TEST(Node, SensorRunsFullHandshake) {
  auto s = make(kSensor, {kActuator}, {kActuator});
  EXPECT_TRUE(s.t4_sample({0, 0}, true));
  EXPECT_FALSE(s.t4_sample({48, 1}, true));

  auto out = s.begin_own_subcycle({48, 1});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->frame, (Frame{kActuator, Opcode::NOTIFY, kSensor}));
  EXPECT_EQ(out->pattern, 2);
  s.end_own_subcycle({60, 1}, CdwmOutcome::done());
  EXPECT_FALSE(s.begin_own_subcycle({96, 2}));

  receive(s, 1, {heard(s, block_frame(kActuator, kFmt))});
  out = s.begin_own_subcycle({96, 2});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->frame, (Frame{kActuator, Opcode::COMMAND, kSensor}));
  s.end_own_subcycle({108, 2}, CdwmOutcome::done());

  receive(s, 2, {heard(s, {kSensor, Opcode::ACK, kActuator})});
  EXPECT_TRUE(s.idle());
  const auto done = s.take_completed();
  ASSERT_EQ(done.size(), 1u);
  EXPECT_EQ(done[0].payload.opcode, Opcode::COMMAND);
  EXPECT_EQ(s.stats().exchanges_delivered, 1u);
}

TEST(Node, MissingBlockTriggersBackoff) {
  auto s = make(kSensor, {kActuator}, {kActuator});
  s.t4_sample({0, 0}, true);
  s.begin_own_subcycle({48, 1});
  s.end_own_subcycle({60, 1}, CdwmOutcome::done());
  receive(s, 1, {});
  EXPECT_EQ(s.stats().retries, 0u);
  receive(s, 2, {});
  EXPECT_EQ(s.stats().retries, 1u);
  // The retry is a fresh NOTIFY once the drawn delay (1 or 2 cycles) has passed.
  EXPECT_FALSE(s.begin_own_subcycle({2 * 48, 2}));
  const auto out = s.begin_own_subcycle({5 * 48, 5});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->frame.opcode, Opcode::NOTIFY);
}

TEST(Node, ForeignBlockDefersUntilAck) {
  auto s = make(kOther, {kActuator, kSensor}, {kActuator});
  receive(s, 0, {heard(s, block_frame(kActuator, kFmt))});
  ASSERT_EQ(s.blocked_by(), kActuator);
  s.t4_sample({50, 1}, true);
  EXPECT_FALSE(s.begin_own_subcycle({60, 1}));
  EXPECT_FALSE(s.begin_own_subcycle({108, 2}));
  receive(s, 2, {heard(s, {kSensor, Opcode::ACK, kActuator})});
  EXPECT_FALSE(s.blocked_by());
  const auto out = s.begin_own_subcycle({156, 3});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->frame.opcode, Opcode::NOTIFY);
}

TEST(Node, BlockStateTimesOut) {
  auto s = make(kOther, {kActuator}, {kActuator});
  receive(s, 0, {heard(s, block_frame(kActuator, kFmt))});
  s.t4_sample({50, 1}, true);
  EXPECT_FALSE(s.begin_own_subcycle({3 * 48, 3}));
  EXPECT_TRUE(s.begin_own_subcycle({4 * 48, 4}));
  EXPECT_FALSE(s.blocked_by());
}

TEST(Node, CleanNotifyGetsBroadcastBlock) {
  auto a = make(kActuator, {kSensor, kOther});
  receive(a, 0, {heard(a, {kActuator, Opcode::NOTIFY, kSensor})});
  EXPECT_EQ(a.reserved_for(), kSensor);
  const auto out = a.begin_own_subcycle({20, 0});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->frame, block_frame(kActuator, kFmt));
  EXPECT_EQ(out->pattern, 0);
}

TEST(Node, CollidingNotifiesAreDiscarded) {
  auto a = make(kActuator, {kSensor, kOther});
  const Frame merged{kActuator, Opcode::NOTIFY, kSensor | kOther | 0b0110};
  receive(a, 0, {heard(a, merged)});
  EXPECT_FALSE(a.reserved_for());
  EXPECT_FALSE(a.begin_own_subcycle({20, 0}));

  auto b = make(kActuator, {kSensor, kOther});
  receive(b, 0, {heard(b, {kActuator, Opcode::NOTIFY, kSensor}), heard(b, {kActuator, Opcode::NOTIFY, kOther})});
  EXPECT_FALSE(b.reserved_for());
  EXPECT_EQ(b.stats().notifies_discarded, 2u);
  EXPECT_FALSE(b.begin_own_subcycle({20, 0}));
}

TEST(Node, CommandIsAcknowledgedThenActuated) {
  auto a = make(kActuator, {kSensor});
  receive(a, 0, {heard(a, {kActuator, Opcode::COMMAND, kSensor})});
  const auto out = a.begin_own_subcycle({20, 0});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->frame, (Frame{kSensor, Opcode::ACK, kActuator}));
  EXPECT_TRUE(a.take_actuations().empty());
  a.end_own_subcycle({30, 0}, CdwmOutcome::done());
  const auto acts = a.take_actuations();
  ASSERT_EQ(acts.size(), 2u);
  EXPECT_EQ(acts[0].stage, 1);
  EXPECT_EQ(acts[0].due_cycle, 30u);
  EXPECT_EQ(acts[1].stage, 2);
  EXPECT_EQ(acts[1].due_cycle, 30u + 48u);
}

TEST(Node, ExitedResponseIsResent) {
  auto a = make(kActuator, {kSensor});
  receive(a, 0, {heard(a, {kActuator, Opcode::COMMAND, kSensor})});
  a.begin_own_subcycle({20, 0});
  a.end_own_subcycle({30, 0}, CdwmOutcome::exited_at(4));
  EXPECT_EQ(a.stats().exits, 1u);
  const auto again = a.begin_own_subcycle({68, 1});
  ASSERT_TRUE(again);
  EXPECT_EQ(again->frame.opcode, Opcode::ACK);
}

TEST(Node, BasicVariantSendsCommandDirectly) {
  auto s = make(kSensor, {kActuator}, {kActuator}, ProtocolVariant::basic);
  s.t4_sample({0, 0}, true);
  const auto out = s.begin_own_subcycle({48, 1});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->frame.opcode, Opcode::COMMAND);
  s.end_own_subcycle({60, 1}, CdwmOutcome::done());
  receive(s, 1, {});
  receive(s, 2, {});
  EXPECT_EQ(s.stats().retries, 1u);
}

TEST(Node, DetectionLatchesUntilFluorescenceStops) {
  auto s = make(kSensor, {kActuator}, {kActuator});
  EXPECT_TRUE(s.t4_sample({0, 0}, true));
  EXPECT_FALSE(s.t4_sample({48, 1}, true));
  EXPECT_FALSE(s.t4_sample({96, 2}, false));
  EXPECT_TRUE(s.t4_sample({144, 3}, true));
}

TEST(Node, RelayIsForwardedToController) {
  NodeParams p;
  p.format = kFmt;
  p.controller_link = true;
  FirstLayerNode hub("hub", memory_for(kSensor, {kOther}), p, Rng(1, 1));
  receive(hub, 0, {heard(hub, {kSensor, Opcode::RELAY, kOther})});
  auto out = hub.begin_own_subcycle({20, 0});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->frame, (Frame{kOther, Opcode::ACK, kSensor}));
  hub.end_own_subcycle({30, 0}, CdwmOutcome::done());
  out = hub.begin_own_subcycle({68, 1});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->frame, (Frame{kFmt.controller(), Opcode::RELAY, kOther}));
  EXPECT_EQ(out->pattern, 0);
  hub.end_own_subcycle({78, 1}, CdwmOutcome::done());
  hub.controller_frame({90, 1}, {kOther, Opcode::ACK, kFmt.controller()});
  EXPECT_TRUE(hub.idle());
}

}  // namespace
}  // namespace invivo
