#include "invivo/frame.hpp"

#include <array>
#include <cctype>

#include "invivo/errors.hpp"

namespace invivo {

namespace {

constexpr std::array<std::string_view, 8> kOpcodeNames = {
    "POSN", "RELAY", "PROBE", "PAT_TRIAL", "COMMAND", "NOTIFY", "ACK", "BLOCK"};

std::string bits_of(std::uint32_t value, std::uint32_t width) {
  std::string s;
  for (std::uint32_t i = 0; i < width; ++i) s += ((value >> (width - 1 - i)) & 1U) ? '1' : '0';
  return s;
}

}  // namespace

BitString BitString::parse(std::string_view text) {
  BitString b;
  for (char c : text) {
    if (c == ' ') continue;
    if (c != '0' && c != '1') throw InvalidArgument("bit strings may only hold 0 and 1");
    if (b.length == 32) throw InvalidArgument("bit string longer than 32 bits");
    b.push(c == '1');
  }
  return b;
}

std::string BitString::str() const { return bits_of(word, length); }

BitString bitwise_or(const BitString& a, const BitString& b) {
  if (a.length != b.length) throw InvalidArgument("bit strings differ in length");
  return {a.word | b.word, a.length};
}

std::string_view to_string(Opcode op) { return kOpcodeNames[static_cast<std::size_t>(op)]; }

std::optional<Opcode> opcode_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kOpcodeNames.size(); ++i) {
    if (kOpcodeNames[i] == name) return static_cast<Opcode>(i);
  }
  return std::nullopt;
}

std::string FrameFormat::address_str(Address a) const { return bits_of(a, address_bits); }

std::optional<Address> FrameFormat::parse_address(std::string_view text) const {
  if (text.size() != address_bits) return std::nullopt;
  std::uint32_t v = 0;
  for (char c : text) {
    if (c != '0' && c != '1') return std::nullopt;
    v = (v << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return static_cast<Address>(v);
}

void FrameFormat::validate() const {
  if (address_bits < 2 || address_bits > 6) {
    throw InvalidArgument("address width must lie in [2, 6]");
  }
}

BitString encode(const Frame& f, const FrameFormat& fmt) {
  const std::uint32_t w = fmt.address_bits;
  const std::uint32_t mask = fmt.address_count() - 1;
  if (f.recipient > mask || f.transmitter > mask) {
    throw InvalidArgument("address does not fit in " + std::to_string(w) + " bits");
  }
  const std::uint32_t word = (std::uint32_t{f.recipient} << (w + 3)) |
                             (static_cast<std::uint32_t>(f.opcode) << w) | f.transmitter;
  return {word, fmt.length()};
}

Frame parse_frame(const BitString& bits, const FrameFormat& fmt) {
  if (bits.length != fmt.length()) {
    throw InvalidArgument("malformed frame: expected " + std::to_string(fmt.length()) +
                          " bits, got " + std::to_string(bits.length));
  }
  const std::uint32_t w = fmt.address_bits;
  const std::uint32_t mask = fmt.address_count() - 1;
  Frame f;
  f.recipient = static_cast<Address>((bits.word >> (w + 3)) & mask);
  f.opcode = static_cast<Opcode>((bits.word >> w) & 0b111U);
  f.transmitter = static_cast<Address>(bits.word & mask);
  return f;
}

std::string format_bits(const Frame& f, const FrameFormat& fmt) {
  return fmt.address_str(f.recipient) + ' ' + bits_of(static_cast<std::uint32_t>(f.opcode), 3) +
         ' ' + fmt.address_str(f.transmitter);
}

Frame block_frame(Address self, const FrameFormat& fmt) {
  return {fmt.broadcast(), Opcode::BLOCK, self};
}

Frame position_frame(std::uint32_t position_id, const FrameFormat& fmt) {
  const std::uint32_t w = fmt.address_bits;
  if (position_id >= (1U << (2 * w))) {
    throw InvalidArgument("position id " + std::to_string(position_id) + " needs more than " +
                          std::to_string(2 * w) + " bits");
  }
  return {static_cast<Address>(position_id >> w), Opcode::POSN,
          static_cast<Address>(position_id & (fmt.address_count() - 1))};
}

std::uint32_t position_of(const Frame& f, const FrameFormat& fmt) {
  return (std::uint32_t{f.recipient} << fmt.address_bits) | f.transmitter;
}

Frame pattern_feedback_frame(Address subject, int pattern_id) {
  return {subject, Opcode::PAT_TRIAL, static_cast<Address>(pattern_id)};
}

std::string_view to_string(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::accepted: return "accepted";
    case DecodeStatus::not_for_me: return "not_for_me";
    case DecodeStatus::collision_suspect: return "collision_suspect";
  }
  return "?";
}

DecodeResult decode_verify(const BitString& bits, Address self, std::uint64_t physical_mask,
                           const FrameFormat& fmt) {
  DecodeResult r;
  r.frame = parse_frame(bits, fmt);
  if (r.frame.recipient != self && r.frame.recipient != fmt.broadcast()) {
    r.status = DecodeStatus::not_for_me;
    return r;
  }
  const bool known = r.frame.transmitter == fmt.controller() ||
                     ((physical_mask >> r.frame.transmitter) & 1U);
  r.status = known ? DecodeStatus::accepted : DecodeStatus::collision_suspect;
  return r;
}

}  // namespace invivo
