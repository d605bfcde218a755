#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "invivo/timebase.hpp"

namespace invivo {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
// Throws DegenerateGeometry for the zero vector.
Vec3 normalized(const Vec3& v);

// Direction from spherical angles in degrees; elevation is measured from the xy plane.
Vec3 direction_from_angles(double azimuth_deg, double elevation_deg);

// Axial hex coordinate, pointy-top layout.
struct HexCell {
  int q = 0;
  int r = 0;
  auto operator<=>(const HexCell&) const = default;
};

std::array<HexCell, 6> neighbors(HexCell c);

enum class WorkingMode : std::uint8_t { T1 = 0, T2 = 1, T3 = 2 };

std::string_view to_string(WorkingMode m);
inline Subcycle transmit_subcycle(WorkingMode m) { return static_cast<Subcycle>(m); }

// Proper 3-coloring of the hex tiling: ((q - r) mod 3) -> T1, T2, T3.
WorkingMode working_mode_of(HexCell c);

// One scan row of the grid extent: cells (q, r) for q in [q_min, q_max].
struct HexRow {
  int r = 0;
  int q_min = 0;
  int q_max = 0;
  friend bool operator==(const HexRow&, const HexRow&) = default;
};

// Honeycomb over the grid plane (z is ignored for cell ownership). The extent is a
// list of rows; scan order is rows in the given order, q ascending within a row.
class HexGrid {
 public:
  HexGrid(double cell_radius, std::vector<HexRow> rows);

  static HexGrid rectangle(double cell_radius, int q_min, int q_max, int r_min, int r_max);

  double cell_radius() const { return cell_radius_; }
  const std::vector<HexRow>& rows() const { return rows_; }

  bool contains(HexCell c) const;
  std::array<double, 2> center(HexCell c) const;
  // Nearest center; equidistant points go to the lexicographically smaller cell.
  // Throws OutOfBounds when that cell lies outside the extent.
  HexCell cell_of(const Vec3& p) const;

  std::vector<HexCell> scan_order() const;
  std::optional<std::size_t> scan_index(HexCell c) const;
  std::size_t cell_count() const;

 private:
  double cell_radius_;
  std::vector<HexRow> rows_;
};

// Orientation of a first-layer node: normal points out of the top detector.
struct NodePose {
  Vec3 position;
  Vec3 normal{0.0, 0.0, 1.0};
  friend bool operator==(const NodePose&, const NodePose&) = default;
};

enum class DetectorSide : std::uint8_t { top = 0, bottom = 1 };

std::string_view to_string(DetectorSide s);

struct LinkGeometry {
  double distance = 0.0;
  Vec3 direction;  // unit vector from a to b
  DetectorSide side_at_b = DetectorSide::top;
};

// Arrival is on b's top side iff the vector from b back to a has a nonnegative
// component along b.normal. Throws DegenerateGeometry for coincident positions.
LinkGeometry geometry_between(const Vec3& a, const NodePose& b);
inline LinkGeometry geometry_between(const NodePose& a, const NodePose& b) {
  return geometry_between(a.position, b);
}

// Position id is the scan index of the node's cell; nodes outside the extent get none.
std::vector<std::optional<std::size_t>> assign_positions(std::span<const Vec3> positions,
                                                          const HexGrid& grid);

}  // namespace invivo
