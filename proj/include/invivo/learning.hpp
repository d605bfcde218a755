#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invivo/trace.hpp"
#include "invivo/world.hpp"

namespace invivo {

struct LearningReport {
  std::uint64_t cycles = 0;  // clock cycles consumed, gaps included
  std::vector<std::string> flags;

  void merge(const LearningReport& other);
};

// Controller scans the grid row by row and tells the nodes in each lit cell its id.
LearningReport run_position_learning(World& world, Trace& trace, std::uint64_t start_cycle = 0);

// Each subject, in address order, probes every other address under every pattern;
// a probed node answers by sweeping its own patterns. An address is physical when
// some probe drew an answer the subject could decode.
LearningReport run_topology_learning(World& world, Trace& trace, std::uint64_t start_cycle = 0);

// For every physical pair the subject sends one trial per pattern; the recipient
// returns the id of the strongest trial (lowest id on ties).
LearningReport run_direction_learning(World& world, Trace& trace, std::uint64_t start_cycle = 0);

// Index of the strongest heard pattern, lowest index on ties; none when nothing was heard.
std::optional<int> strongest_pattern(std::span<const std::optional<double>> powers);

// Working mode from the coloring of the learned cell. Unpositioned nodes get T1.
LearningReport run_mode_learning(World& world, Trace& trace, std::uint64_t start_cycle = 0);

// All four procedures, then the check that every recognized recipient is physical
// (throws ConfigError otherwise).
LearningReport run_learning(World& world, Trace& trace, std::uint64_t start_cycle = 0);

// Bits seen on each detector of rx while tx sends `bits` alone under `pattern`, and
// the strongest per-clock detector power observed.
struct LoneReception {
  std::array<BitString, 2> bits;
  double peak_power = 0.0;
};
LoneReception receive_alone(const LinkTable& links, std::size_t tx, int pattern,
                            const BitString& bits, std::size_t rx);

}  // namespace invivo
