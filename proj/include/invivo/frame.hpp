#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace invivo {

// Bit string of at most 32 bits, first-transmitted bit most significant. For equal
// lengths, numeric order is lexicographic order.
struct BitString {
  std::uint32_t word = 0;
  std::uint32_t length = 0;

  bool bit(std::uint32_t index) const { return (word >> (length - 1 - index)) & 1U; }
  bool any() const { return word != 0; }
  void push(bool b) {
    word = (word << 1) | (b ? 1U : 0U);
    ++length;
  }

  static BitString parse(std::string_view text);  // ignores spaces
  std::string str() const;

  auto operator<=>(const BitString&) const = default;
};

BitString bitwise_or(const BitString& a, const BitString& b);

enum class Opcode : std::uint8_t {
  POSN = 0b000,
  RELAY = 0b001,
  PROBE = 0b010,
  PAT_TRIAL = 0b011,
  COMMAND = 0b100,
  NOTIFY = 0b101,
  ACK = 0b110,
  BLOCK = 0b111,
};

std::string_view to_string(Opcode op);
std::optional<Opcode> opcode_from_string(std::string_view name);

using Address = std::uint8_t;

// Layout: recipient (W bits) | opcode (3 bits) | transmitter (W bits).
struct FrameFormat {
  std::uint32_t address_bits = 4;

  std::uint32_t length() const { return 2 * address_bits + 3; }
  std::uint32_t address_count() const { return 1U << address_bits; }
  Address broadcast() const { return static_cast<Address>(address_count() - 1); }
  Address controller() const { return static_cast<Address>(address_count() - 2); }
  bool is_actuator(Address a) const { return (a >> (address_bits - 1)) & 1U; }
  bool is_special(Address a) const { return a == broadcast() || a == controller(); }
  std::string address_str(Address a) const;
  std::optional<Address> parse_address(std::string_view text) const;

  // Throws InvalidArgument for widths outside [2, 6].
  void validate() const;
};

struct Frame {
  Address recipient = 0;
  Opcode opcode = Opcode::POSN;
  Address transmitter = 0;

  friend bool operator==(const Frame&, const Frame&) = default;
};

BitString encode(const Frame& f, const FrameFormat& fmt);
// Splits a bit string into fields; throws InvalidArgument on a length mismatch.
Frame parse_frame(const BitString& bits, const FrameFormat& fmt);
// "1000 101 0000"
std::string format_bits(const Frame& f, const FrameFormat& fmt);

// BLOCK frames are broadcast; their transmitter names the reserving node.
Frame block_frame(Address self, const FrameFormat& fmt);

// Position frames spread a 2W-bit id over the recipient and transmitter fields.
Frame position_frame(std::uint32_t position_id, const FrameFormat& fmt);
std::uint32_t position_of(const Frame& f, const FrameFormat& fmt);

// Direction-learning feedback carries the pattern id in the transmitter field.
Frame pattern_feedback_frame(Address subject, int pattern_id);

enum class DecodeStatus : std::uint8_t { accepted, not_for_me, collision_suspect };

std::string_view to_string(DecodeStatus s);

struct DecodeResult {
  DecodeStatus status = DecodeStatus::accepted;
  Frame frame;  // parsed fields, kept for rejected frames so ACKs can be overheard

  bool ok() const { return status == DecodeStatus::accepted; }
};

// Recipient must be self or broadcast (otherwise not_for_me); the transmitter must
// be a physical neighbor or the controller (otherwise collision_suspect).
// physical_mask has bit a set when address a is physical.
DecodeResult decode_verify(const BitString& bits, Address self, std::uint64_t physical_mask,
                           const FrameFormat& fmt);

}  // namespace invivo
