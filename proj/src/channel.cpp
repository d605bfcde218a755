#include "invivo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "invivo/errors.hpp"

namespace invivo {

void ChannelConfig::validate() const {
  if (!(mu >= 0.0)) throw InvalidArgument("channel.mu must be nonnegative");
  if (!(theta_fluor > 0.0)) throw InvalidArgument("channel.theta_fluor must be positive");
  if (!(theta_fluor < theta_detect)) {
    throw InvalidArgument("channel.theta_fluor must be below channel.theta_detect");
  }
  if (!(tx_power > 0.0)) throw InvalidArgument("channel.tx_power must be positive");
  if (!(fluor_power >= 0.0 && fluor_power < tx_power)) {
    throw InvalidArgument("channel.fluor_power must lie in [0, tx_power)");
  }
}

double propagation_factor(double distance, double mu) {
  return std::exp(-mu * distance) / (4.0 * std::numbers::pi * distance * distance);
}

ReceivedPower received_power(const NodePose& tx, const PatternTable& patterns, int pattern_id,
                             const NodePose& rx, const ChannelConfig& cfg) {
  const LinkGeometry g = geometry_between(tx, rx);
  const double gain = patterns.gain(pattern_id, g.direction);
  return {cfg.tx_power * gain * propagation_factor(g.distance, cfg.mu), g.side_at_b};
}

ReceivedPower isotropic_power(const Vec3& source, double emit_power, const NodePose& rx,
                              double mu) {
  const LinkGeometry g = geometry_between(source, rx);
  return {emit_power * propagation_factor(g.distance, mu), g.side_at_b};
}

LinkTable::LinkTable(std::span<const NodePose> poses, std::span<const PatternTable> patterns,
                     const ChannelConfig& cfg)
    : n_(poses.size()), cfg_(cfg) {
  if (patterns.size() != poses.size()) {
    throw InvalidArgument("one pattern table per node is required");
  }
  std::size_t offset = 0;
  for (const auto& t : patterns) {
    pattern_counts_.push_back(t.size());
    offsets_.push_back(offset);
    offset += t.size() * n_;
  }
  power_.assign(offset, 0.0);
  side_.assign(n_ * n_, DetectorSide::top);
  for (std::size_t tx = 0; tx < n_; ++tx) {
    for (std::size_t rx = 0; rx < n_; ++rx) {
      if (tx == rx) continue;
      for (std::size_t p = 0; p < pattern_counts_[tx]; ++p) {
        const auto rp =
            received_power(poses[tx], patterns[tx], static_cast<int>(p), poses[rx], cfg);
        power_[offsets_[tx] + p * n_ + rx] = rp.power;
        side_[tx * n_ + rx] = rp.side;
      }
    }
  }
}

double LinkTable::power(std::size_t tx, int pattern, std::size_t rx) const {
  if (tx >= n_ || rx >= n_) throw OutOfBounds("node index out of range");
  if (pattern < 0 || static_cast<std::size_t>(pattern) >= pattern_counts_[tx]) {
    throw InvalidArgument("node " + std::to_string(tx) + " has no pattern " +
                          std::to_string(pattern));
  }
  return power_[offsets_[tx] + static_cast<std::size_t>(pattern) * n_ + rx];
}

double LinkTable::best_power(std::size_t tx, std::size_t rx) const {
  double best = 0.0;
  for (std::size_t p = 0; p < pattern_counts_[tx]; ++p) {
    best = std::max(best, power(tx, static_cast<int>(p), rx));
  }
  return best;
}

ChannelReading superpose(std::span<const Transmission> transmissions, std::size_t rx,
                         const LinkTable& links, std::array<double, 2> ambient) {
  const double theta = links.config().theta_detect;
  ChannelReading out;
  for (int s = 0; s < 2; ++s) {
    out.detector[s].power = ambient[s];
    out.detector[s].ambient = ambient[s];
  }
  for (const auto& t : transmissions) {
    if (!t.bit || t.tx == rx) continue;
    const double p = links.power(t.tx, t.pattern, rx);
    if (p <= 0.0) continue;
    auto& d = out.detector[static_cast<int>(links.side(t.tx, rx))];
    d.power += p;
    if (std::find(d.contributors.begin(), d.contributors.end(), t.tx) == d.contributors.end()) {
      d.contributors.push_back(t.tx);
      if (p >= theta) ++d.strong_contributors;
    }
  }
  for (auto& d : out.detector) {
    std::sort(d.contributors.begin(), d.contributors.end());
    d.bit = d.power >= theta;
    d.collision_evidence = d.strong_contributors >= 2;
  }
  return out;
}

ChannelTick evaluate_tick(std::span<const Transmission> transmissions, const LinkTable& links,
                          std::span<const std::array<double, 2>> ambient) {
  ChannelTick tick;
  tick.reserve(links.node_count());
  for (std::size_t rx = 0; rx < links.node_count(); ++rx) {
    const std::array<double, 2> amb = rx < ambient.size() ? ambient[rx] : std::array{0.0, 0.0};
    tick.push_back(superpose(transmissions, rx, links, amb));
  }
  return tick;
}

bool carrier_sense(const ChannelReading& reading, const ChannelConfig& cfg) {
  return reading.max_power() >= cfg.theta_detect;
}

}  // namespace invivo
