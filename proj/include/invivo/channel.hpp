#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "invivo/antenna.hpp"
#include "invivo/geometry.hpp"

namespace invivo {

struct ChannelConfig {
  double mu = 0.5;              // attenuation per length unit
  double theta_detect = 3e-5;   // first-layer detection threshold
  double theta_fluor = 1e-6;    // T4 fluorescence threshold
  double tx_power = 1.0;        // first-layer emission
  double fluor_power = 1e-4;    // second-layer emission

  // Throws InvalidArgument when the ordering constraints between powers and
  // thresholds do not hold.
  void validate() const;
  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

// exp(-mu d) / (4 pi d^2)
double propagation_factor(double distance, double mu);

struct ReceivedPower {
  double power = 0.0;
  DetectorSide side = DetectorSide::top;
};

ReceivedPower received_power(const NodePose& tx, const PatternTable& patterns, int pattern_id,
                             const NodePose& rx, const ChannelConfig& cfg);

// Isotropic emitter such as a fluorescent cluster.
ReceivedPower isotropic_power(const Vec3& source, double emit_power, const NodePose& rx,
                              double mu);

// Precomputed powers for every (transmitter, pattern, receiver) triple of a node set.
class LinkTable {
 public:
  LinkTable(std::span<const NodePose> poses, std::span<const PatternTable> patterns,
            const ChannelConfig& cfg);

  std::size_t node_count() const { return n_; }
  std::size_t pattern_count(std::size_t tx) const { return pattern_counts_[tx]; }
  const ChannelConfig& config() const { return cfg_; }

  // Zero when tx == rx.
  double power(std::size_t tx, int pattern, std::size_t rx) const;
  DetectorSide side(std::size_t tx, std::size_t rx) const { return side_[tx * n_ + rx]; }
  // Strongest power over all of tx's patterns.
  double best_power(std::size_t tx, std::size_t rx) const;

 private:
  std::size_t n_;
  ChannelConfig cfg_;
  std::vector<std::size_t> pattern_counts_;
  std::vector<std::size_t> offsets_;
  std::vector<double> power_;
  std::vector<DetectorSide> side_;
};

struct Transmission {
  std::size_t tx = 0;
  int pattern = 0;
  bool bit = false;
};

struct DetectorReading {
  double power = 0.0;           // first-layer plus ambient
  double ambient = 0.0;         // second-layer fluorescence share of power
  std::vector<std::size_t> contributors;  // first-layer transmitters with nonzero power
  std::size_t strong_contributors = 0;    // contributors at or above theta_detect alone
  bool bit = false;
  bool collision_evidence = false;
};

struct ChannelReading {
  std::array<DetectorReading, 2> detector;

  const DetectorReading& at(DetectorSide s) const { return detector[static_cast<int>(s)]; }
  double max_power() const { return std::max(detector[0].power, detector[1].power); }
};

// OR superposition of one clock's transmissions at receiver rx. Ambient power is
// added per detector before thresholding.
ChannelReading superpose(std::span<const Transmission> transmissions, std::size_t rx,
                         const LinkTable& links, std::array<double, 2> ambient = {0.0, 0.0});

// Readings for every node in the table.
using ChannelTick = std::vector<ChannelReading>;

ChannelTick evaluate_tick(std::span<const Transmission> transmissions, const LinkTable& links,
                          std::span<const std::array<double, 2>> ambient = {});

bool carrier_sense(const ChannelReading& reading, const ChannelConfig& cfg);

}  // namespace invivo
