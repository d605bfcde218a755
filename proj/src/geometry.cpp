#include "invivo/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "invivo/errors.hpp"

namespace invivo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

int floor_mod3(int v) { return ((v % 3) + 3) % 3; }

HexCell cube_round(double fq, double fr) {
  const double fs = -fq - fr;
  double q = std::round(fq);
  double r = std::round(fr);
  const double s = std::round(fs);
  const double dq = std::abs(q - fq);
  const double dr = std::abs(r - fr);
  const double ds = std::abs(s - fs);
  if (dq > dr && dq > ds) {
    q = -r - s;
  } else if (dr > ds) {
    r = -q - s;
  }
  return {static_cast<int>(q), static_cast<int>(r)};
}

}  // namespace

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw DegenerateGeometry("cannot normalize a zero vector");
  return v * (1.0 / n);
}

Vec3 direction_from_angles(double azimuth_deg, double elevation_deg) {
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double az = azimuth_deg * kDeg;
  const double el = elevation_deg * kDeg;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

std::array<HexCell, 6> neighbors(HexCell c) {
  return {{{c.q + 1, c.r}, {c.q - 1, c.r}, {c.q, c.r + 1},
           {c.q, c.r - 1}, {c.q + 1, c.r - 1}, {c.q - 1, c.r + 1}}};
}

std::string_view to_string(WorkingMode m) {
  switch (m) {
    case WorkingMode::T1: return "T1";
    case WorkingMode::T2: return "T2";
    case WorkingMode::T3: return "T3";
  }
  return "?";
}

WorkingMode working_mode_of(HexCell c) {
  return static_cast<WorkingMode>(floor_mod3(c.q - c.r));
}

HexGrid::HexGrid(double cell_radius, std::vector<HexRow> rows)
    : cell_radius_(cell_radius), rows_(std::move(rows)) {
  if (!(cell_radius_ > 0.0)) throw InvalidArgument("cell_radius must be positive");
  if (rows_.empty()) throw InvalidArgument("grid extent has no rows");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].q_min > rows_[i].q_max) {
      throw InvalidArgument("grid row r=" + std::to_string(rows_[i].r) + " has q_min > q_max");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (rows_[j].r == rows_[i].r) {
        throw InvalidArgument("grid row r=" + std::to_string(rows_[i].r) + " listed twice");
      }
    }
  }
}

HexGrid HexGrid::rectangle(double cell_radius, int q_min, int q_max, int r_min, int r_max) {
  std::vector<HexRow> rows;
  for (int r = r_min; r <= r_max; ++r) rows.push_back({r, q_min, q_max});
  return HexGrid(cell_radius, std::move(rows));
}

bool HexGrid::contains(HexCell c) const {
  return std::any_of(rows_.begin(), rows_.end(), [&](const HexRow& row) {
    return row.r == c.r && c.q >= row.q_min && c.q <= row.q_max;
  });
}

std::array<double, 2> HexGrid::center(HexCell c) const {
  return {cell_radius_ * kSqrt3 * (c.q + 0.5 * c.r), cell_radius_ * 1.5 * c.r};
}

HexCell HexGrid::cell_of(const Vec3& p) const {
  const double fq = (kSqrt3 / 3.0 * p.x - p.y / 3.0) / cell_radius_;
  const double fr = (2.0 / 3.0 * p.y) / cell_radius_;
  const HexCell guess = cube_round(fq, fr);

  // The rounded cell is the nearest center up to ties, which can only involve
  // its neighbors; resolve those explicitly.
  const double tol = 1e-9 * cell_radius_ * cell_radius_;
  HexCell best = guess;
  double best_d2 = std::numeric_limits<double>::infinity();
  auto consider = [&](HexCell c) {
    const auto ctr = center(c);
    const double dx = p.x - ctr[0];
    const double dy = p.y - ctr[1];
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2 - tol || (std::abs(d2 - best_d2) <= tol && c < best)) {
      best = c;
      best_d2 = std::min(best_d2, d2);
    }
  };
  consider(guess);
  for (const HexCell& n : neighbors(guess)) consider(n);

  if (!contains(best)) {
    throw OutOfBounds("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") lies outside the grid extent");
  }
  return best;
}

std::vector<HexCell> HexGrid::scan_order() const {
  std::vector<HexCell> out;
  for (const auto& row : rows_) {
    for (int q = row.q_min; q <= row.q_max; ++q) out.push_back({q, row.r});
  }
  return out;
}

std::optional<std::size_t> HexGrid::scan_index(HexCell c) const {
  std::size_t base = 0;
  for (const auto& row : rows_) {
    if (row.r == c.r && c.q >= row.q_min && c.q <= row.q_max) {
      return base + static_cast<std::size_t>(c.q - row.q_min);
    }
    base += static_cast<std::size_t>(row.q_max - row.q_min + 1);
  }
  return std::nullopt;
}

std::size_t HexGrid::cell_count() const {
  std::size_t n = 0;
  for (const auto& row : rows_) n += static_cast<std::size_t>(row.q_max - row.q_min + 1);
  return n;
}

std::string_view to_string(DetectorSide s) {
  return s == DetectorSide::top ? "top" : "bottom";
}

LinkGeometry geometry_between(const Vec3& a, const NodePose& b) {
  const Vec3 delta = b.position - a;
  const double d = norm(delta);
  if (!(d > 0.0)) throw DegenerateGeometry("coincident node positions");
  const Vec3 dir = delta * (1.0 / d);
  const DetectorSide side = dot(-dir, b.normal) >= 0.0 ? DetectorSide::top : DetectorSide::bottom;
  return {d, dir, side};
}

std::vector<std::optional<std::size_t>> assign_positions(std::span<const Vec3> positions,
                                                          const HexGrid& grid) {
  std::vector<std::optional<std::size_t>> ids;
  ids.reserve(positions.size());
  for (const Vec3& p : positions) {
    try {
      ids.push_back(grid.scan_index(grid.cell_of(p)));
    } catch (const OutOfBounds&) {
      ids.push_back(std::nullopt);
    }
  }
  return ids;
}

}  // namespace invivo
