#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "invivo/geometry.hpp"

namespace invivo {

// Scalar reduction of the nonlinear polarization expansion.
struct NonlinearMedium {
  double chi1 = 1.0;
  double chi2 = 0.0;
  double chi3 = 1.0;
  double eps0 = 1.0;
};

// P = eps0 * (chi1 E + chi2 E^2 + chi3 E^3) with E = e_opt + e_static.
double polarization(double e_opt, double e_static, const NonlinearMedium& m);

// Element positions share the length unit of the wavelength.
struct ElementArray {
  std::vector<Vec3> positions;
  double wavelength = 1.0;
  double v_sat = 1.0;
  double a_on = 1.0;
  double a_off = 0.0;

  std::size_t size() const { return positions.size(); }
  void validate() const;
  friend bool operator==(const ElementArray&, const ElementArray&) = default;
};

// a(v) = a_off + (a_on - a_off) * min(v / v_sat, 1). Throws on negative voltage.
double element_amplitude(double v, const ElementArray& arr);

// AF(d) = sum_k w_k exp(i 2 pi / lambda <p_k, d>).
std::complex<double> array_factor(const ElementArray& arr,
                                  std::span<const std::complex<double>> weights,
                                  const Vec3& direction);

// |AF|^2 / (sum_k |w_k|)^2: coherence of the given weights toward a direction.
double array_gain(const ElementArray& arr, std::span<const std::complex<double>> weights,
                  const Vec3& direction);

struct RadiationPattern {
  int id = 0;
  std::vector<double> voltage_mask;  // one static voltage per element
};

// Pattern gain is |AF|^2 normalized by the all-on reference (N * a_on)^2, so a
// pattern that switches elements off also radiates less.
class PatternTable {
 public:
  PatternTable(ElementArray array, std::vector<RadiationPattern> patterns);

  const ElementArray& array() const { return array_; }
  const std::vector<RadiationPattern>& patterns() const { return patterns_; }
  std::size_t size() const { return patterns_.size(); }

  double gain(int pattern_id, const Vec3& direction) const;

 private:
  ElementArray array_;
  std::vector<RadiationPattern> patterns_;
  std::vector<std::vector<double>> amplitudes_;
};

double mask_gain(const ElementArray& arr, std::span<const double> voltage_mask,
                 const Vec3& direction);

constexpr std::size_t kExhaustiveMaskLimit = 12;

// Pattern 0 drives every element at v_sat. Pattern k >= 1 maximizes gain toward
// targets[k-1] over binary masks {0, v_sat}: exhaustive up to kExhaustiveMaskLimit
// elements (ties go to the lexicographically smallest mask), greedy beyond.
PatternTable synthesize_pattern_table(const ElementArray& arr, std::span<const Vec3> targets,
                                      std::size_t n_patterns);

// JSON export: elements, masks and a gain table sampled over azimuth at the given elevation.
void write_pattern_table(std::ostream& os, const PatternTable& table, int azimuth_steps = 72,
                         double elevation_deg = 0.0);

}  // namespace invivo
