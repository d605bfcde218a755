#include "invivo/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include <json.hpp>

#include "invivo/errors.hpp"

namespace invivo {

namespace {

constexpr double kGainTieTolerance = 1e-12;

std::complex<double> steering_sum(const ElementArray& arr, std::span<const double> amplitudes,
                                  const Vec3& direction) {
  const double k = 2.0 * std::numbers::pi / arr.wavelength;
  std::complex<double> af{0.0, 0.0};
  for (std::size_t i = 0; i < arr.size(); ++i) {
    af += amplitudes[i] * std::polar(1.0, k * dot(arr.positions[i], direction));
  }
  return af;
}

std::vector<double> amplitudes_for(const ElementArray& arr, std::span<const double> mask) {
  std::vector<double> out(mask.size());
  std::transform(mask.begin(), mask.end(), out.begin(),
                 [&](double v) { return element_amplitude(v, arr); });
  return out;
}

double reference_gain(const ElementArray& arr, std::span<const double> amplitudes,
                      const Vec3& direction) {
  const double ref = static_cast<double>(arr.size()) * arr.a_on;
  if (!(ref > 0.0)) return 0.0;
  return std::norm(steering_sum(arr, amplitudes, direction)) / (ref * ref);
}

std::vector<double> mask_from_bits(std::uint64_t bits, std::size_t n, double v_sat) {
  // Element 0 is the most significant bit, so increasing integers enumerate masks
  // in lexicographic order.
  std::vector<double> mask(n);
  for (std::size_t k = 0; k < n; ++k) mask[k] = ((bits >> (n - 1 - k)) & 1U) ? v_sat : 0.0;
  return mask;
}

std::vector<double> exhaustive_mask(const ElementArray& arr, const Vec3& target) {
  const std::size_t n = arr.size();
  std::vector<double> best;
  double best_gain = -1.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    auto mask = mask_from_bits(bits, n, arr.v_sat);
    const double g = mask_gain(arr, mask, target);
    if (g > best_gain + kGainTieTolerance) {
      best_gain = g;
      best = std::move(mask);
    }
  }
  return best;
}

std::vector<double> greedy_mask(const ElementArray& arr, const Vec3& target) {
  std::vector<double> mask(arr.size(), arr.v_sat);
  double current = mask_gain(arr, mask, target);
  for (;;) {
    std::size_t best_k = arr.size();
    double best_gain = current;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      if (mask[k] == 0.0) continue;
      mask[k] = 0.0;
      const double g = mask_gain(arr, mask, target);
      mask[k] = arr.v_sat;
      if (g > best_gain + kGainTieTolerance) {
        best_gain = g;
        best_k = k;
      }
    }
    if (best_k == arr.size()) return mask;
    mask[best_k] = 0.0;
    current = best_gain;
  }
}

}  // namespace

double polarization(double e_opt, double e_static, const NonlinearMedium& m) {
  const double e = e_opt + e_static;
  return m.eps0 * (m.chi1 * e + m.chi2 * e * e + m.chi3 * e * e * e);
}

void ElementArray::validate() const {
  if (positions.empty()) throw InvalidArgument("element array is empty");
  if (!(wavelength > 0.0)) throw InvalidArgument("wavelength must be positive");
  if (!(v_sat > 0.0)) throw InvalidArgument("v_sat must be positive");
  if (!(a_off >= 0.0 && a_off <= a_on && a_on <= 1.0)) {
    throw InvalidArgument("amplitudes must satisfy 0 <= a_off <= a_on <= 1");
  }
}

double element_amplitude(double v, const ElementArray& arr) {
  if (v < 0.0) throw InvalidArgument("applied voltage must be nonnegative");
  return arr.a_off + (arr.a_on - arr.a_off) * std::min(v / arr.v_sat, 1.0);
}

std::complex<double> array_factor(const ElementArray& arr,
                                  std::span<const std::complex<double>> weights,
                                  const Vec3& direction) {
  if (arr.positions.empty()) throw InvalidArgument("element array is empty");
  if (weights.size() != arr.size()) {
    throw InvalidArgument("expected " + std::to_string(arr.size()) + " weights, got " +
                          std::to_string(weights.size()));
  }
  const double k = 2.0 * std::numbers::pi / arr.wavelength;
  std::complex<double> af{0.0, 0.0};
  for (std::size_t i = 0; i < arr.size(); ++i) {
    af += weights[i] * std::polar(1.0, k * dot(arr.positions[i], direction));
  }
  return af;
}

double array_gain(const ElementArray& arr, std::span<const std::complex<double>> weights,
                  const Vec3& direction) {
  const std::complex<double> af = array_factor(arr, weights, direction);
  double total = 0.0;
  for (const auto& w : weights) total += std::abs(w);
  if (total == 0.0) return 0.0;
  return std::norm(af) / (total * total);
}

double mask_gain(const ElementArray& arr, std::span<const double> voltage_mask,
                 const Vec3& direction) {
  if (voltage_mask.size() != arr.size()) throw InvalidArgument("mask size mismatch");
  const auto amps = amplitudes_for(arr, voltage_mask);
  return reference_gain(arr, amps, direction);
}

PatternTable::PatternTable(ElementArray array, std::vector<RadiationPattern> patterns)
    : array_(std::move(array)), patterns_(std::move(patterns)) {
  array_.validate();
  if (patterns_.empty()) throw InvalidArgument("pattern table is empty");
  for (std::size_t i = 0; i < patterns_.size(); ++i) {
    if (patterns_[i].id != static_cast<int>(i)) {
      throw InvalidArgument("pattern ids must be 0..n-1 in order");
    }
    if (patterns_[i].voltage_mask.size() != array_.size()) {
      throw InvalidArgument("pattern " + std::to_string(i) + " mask size mismatch");
    }
    amplitudes_.push_back(amplitudes_for(array_, patterns_[i].voltage_mask));
  }
}

double PatternTable::gain(int pattern_id, const Vec3& direction) const {
  if (pattern_id < 0 || static_cast<std::size_t>(pattern_id) >= patterns_.size()) {
    throw InvalidArgument("unknown pattern id " + std::to_string(pattern_id));
  }
  return reference_gain(array_, amplitudes_[static_cast<std::size_t>(pattern_id)], direction);
}

PatternTable synthesize_pattern_table(const ElementArray& arr, std::span<const Vec3> targets,
                                      std::size_t n_patterns) {
  arr.validate();
  if (n_patterns < 1) throw InvalidArgument("n_patterns must be at least 1");
  if (n_patterns > targets.size() + 1) {
    throw InvalidArgument("n_patterns (" + std::to_string(n_patterns) + ") exceeds targets + 1 (" +
                          std::to_string(targets.size() + 1) + ")");
  }
  std::vector<RadiationPattern> patterns;
  patterns.push_back({0, std::vector<double>(arr.size(), arr.v_sat)});
  for (std::size_t k = 1; k < n_patterns; ++k) {
    const Vec3 target = normalized(targets[k - 1]);
    auto mask = arr.size() <= kExhaustiveMaskLimit ? exhaustive_mask(arr, target)
                                                   : greedy_mask(arr, target);
    patterns.push_back({static_cast<int>(k), std::move(mask)});
  }
  return PatternTable(arr, std::move(patterns));
}

void write_pattern_table(std::ostream& os, const PatternTable& table, int azimuth_steps,
                         double elevation_deg) {
  nlohmann::ordered_json doc;
  doc["wavelength"] = table.array().wavelength;
  doc["v_sat"] = table.array().v_sat;
  auto& elems = doc["elements"] = nlohmann::ordered_json::array();
  for (const auto& p : table.array().positions) elems.push_back({p.x, p.y, p.z});
  doc["elevation_deg"] = elevation_deg;
  auto& pats = doc["patterns"] = nlohmann::ordered_json::array();
  for (const auto& pat : table.patterns()) {
    nlohmann::ordered_json entry;
    entry["id"] = pat.id;
    entry["mask"] = pat.voltage_mask;
    auto& gains = entry["gain"] = nlohmann::ordered_json::array();
    for (int i = 0; i < azimuth_steps; ++i) {
      const double az = 360.0 * i / azimuth_steps;
      gains.push_back({az, table.gain(pat.id, direction_from_angles(az, elevation_deg))});
    }
    pats.push_back(std::move(entry));
  }
  os << doc.dump(2) << '\n';
}

}  // namespace invivo
