#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invivo/config.hpp"
#include "invivo/trace.hpp"
#include "invivo/world.hpp"

namespace invivo {

struct LatencySample {
  std::string kind;  // actuation | service | exchange
  std::string node;
  std::uint64_t cycles = 0;
};

struct Metrics {
  std::string scenario;
  std::string protocol;
  std::uint64_t seed = 0;
  bool timed_out = false;
  std::uint64_t cycles = 0;  // working-mode clock cycles simulated

  std::uint64_t collisions = 0;  // rejected frames addressed to the receiver
  std::uint64_t exits = 0;
  std::uint64_t retries = 0;
  std::uint64_t notifies_discarded = 0;
  std::uint64_t commands_sent = 0;  // COMMAND and RELAY frames fully emitted
  std::uint64_t commands_delivered = 0;
  std::uint64_t exchanges_issued = 0;
  std::uint64_t exchanges_delivered = 0;
  std::uint64_t exchanges_lost = 0;
  std::uint64_t actuations = 0;
  std::uint64_t clusters_killed = 0;
  std::uint64_t requests_dropped = 0;
  double total_dose = 0.0;
  std::map<std::uint32_t, double> doses;  // by position id

  std::uint64_t rounds = 0;
  std::uint64_t blocked_rounds = 0;
  std::uint64_t oracle_mismatches = 0;
  std::uint64_t block_violations = 0;

  std::vector<LatencySample> latencies;

  double delivery_ratio() const {
    return commands_sent == 0 ? 1.0
                              : static_cast<double>(commands_delivered) /
                                    static_cast<double>(commands_sent);
  }
  std::optional<std::uint64_t> max_latency(const std::string& kind) const;
  // Flat numeric view used for bounds checks.
  std::map<std::string, double> values() const;
};

void write_metrics(std::ostream& os, const Metrics& m);
void write_summary_table(std::ostream& os, const std::vector<Metrics>& runs);

// True when the summed fluorescence on either detector reaches theta_fluor.
bool t4_sample(const std::array<double, 2>& ambient, const ChannelConfig& cfg);

// Dose added on round k (0-based): min(d0 * 2^k, cap).
double dose_step(std::uint32_t round, double d0, double cap);

// Working-mode run on a world whose memory is already learned. Trace cycles are
// offset by start_cycle.
Metrics run_scenario(const World& world, const ScenarioSpec& spec, std::uint64_t seed,
                     Trace& trace, std::uint64_t start_cycle = 0);

}  // namespace invivo
