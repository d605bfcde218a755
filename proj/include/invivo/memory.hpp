#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "invivo/frame.hpp"
#include "invivo/geometry.hpp"

namespace invivo {

// Learned tables of one first-layer node.
struct NodeMemory {
  Address self = 0;
  std::uint64_t recognized = 0;  // bit a set: address a is a control recipient
  std::uint64_t physical = 0;    // bit a set: address a answered in topology learning
  std::vector<int> optimal_pattern;  // indexed by address; 0 where not applicable
  WorkingMode working_mode = WorkingMode::T1;
  std::optional<std::uint32_t> position_id;

  NodeMemory() = default;
  NodeMemory(Address self_address, const FrameFormat& fmt)
      : self(self_address), optimal_pattern(fmt.address_count(), 0) {}

  bool is_recognized(Address a) const { return (recognized >> a) & 1U; }
  bool is_physical(Address a) const { return (physical >> a) & 1U; }
  int pattern_for(Address a) const {
    return a < optimal_pattern.size() ? optimal_pattern[a] : 0;
  }

  friend bool operator==(const NodeMemory&, const NodeMemory&) = default;
};

struct NamedMemory {
  std::string name;
  NodeMemory memory;
  friend bool operator==(const NamedMemory&, const NamedMemory&) = default;
};

// Tab-separated table, one node per line, addresses in binary.
void write_memory_snapshot(std::ostream& os, const std::vector<NamedMemory>& nodes,
                           const FrameFormat& fmt);
// Throws ConfigError on malformed lines.
std::vector<NamedMemory> read_memory_snapshot(std::istream& is, const FrameFormat& fmt);

}  // namespace invivo
