#include <gtest/gtest.h>

#include <random>
#include <set>

#include "invivo/errors.hpp"
#include "invivo/geometry.hpp"

namespace invivo {
namespace {

TEST(HexGrid, OriginAndCentersAreFixedPoints) {
  const auto grid = HexGrid::rectangle(1.0, -3, 3, -3, 3);
  EXPECT_EQ(grid.cell_of({0, 0, 0}), (HexCell{0, 0}));
  for (const HexCell c : grid.scan_order()) {
    const auto ctr = grid.center(c);
    EXPECT_EQ(grid.cell_of({ctr[0], ctr[1], 5.0}), c);
  }
}

TEST(HexGrid, EquidistantPointGoesToSmallerCell) {
  const auto grid = HexGrid::rectangle(1.0, -2, 2, -2, 2);
  for (const HexCell n : neighbors({0, 0})) {
    const auto ctr = grid.center(n);
    const Vec3 mid{ctr[0] / 2, ctr[1] / 2, 0};
    const HexCell expect = std::min(n, HexCell{0, 0});
    EXPECT_EQ(grid.cell_of(mid), expect) << n.q << "," << n.r;
  }
}

TEST(HexGrid, OutsideExtentThrows) {
  const HexGrid grid(1.0, {{0, 0, 0}});
  EXPECT_THROW(grid.cell_of({10, 10, 0}), OutOfBounds);
}

TEST(HexGrid, ScanOrderFollowsRows) {
  const HexGrid grid(1.0, {{2, -1, 0}, {0, 1, 2}});
  const std::vector<HexCell> expect{{-1, 2}, {0, 2}, {1, 0}, {2, 0}};
  EXPECT_EQ(grid.scan_order(), expect);
  EXPECT_EQ(grid.scan_index({1, 0}), 2u);
  EXPECT_FALSE(grid.scan_index({0, 0}).has_value());
}

TEST(WorkingMode, ColoringExamples) {
  EXPECT_EQ(working_mode_of({0, 0}), WorkingMode::T1);
  EXPECT_EQ(working_mode_of({1, 0}), WorkingMode::T2);
  for (const HexCell n : neighbors({0, 0})) EXPECT_NE(working_mode_of(n), WorkingMode::T1);
}

TEST(WorkingMode, NeighborsDifferOnLargePatch) {
  for (int q = -15; q <= 15; ++q) {
    for (int r = -15; r <= 15; ++r) {
      for (const HexCell n : neighbors({q, r})) {
        ASSERT_NE(working_mode_of({q, r}), working_mode_of(n));
      }
    }
  }
}

TEST(Neighbors, AreAtUnitHexDistance) {
  const auto grid = HexGrid::rectangle(2.0, -2, 2, -2, 2);
  const auto c0 = grid.center({0, 0});
  std::set<HexCell> seen;
  for (const HexCell n : neighbors({0, 0})) {
    const auto c = grid.center(n);
    EXPECT_NEAR(std::hypot(c[0] - c0[0], c[1] - c0[1]), 2.0 * std::sqrt(3.0), 1e-12);
    seen.insert(n);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(DetectorSide, AlignedArrivalIsTop) {
  const NodePose b{{0, 0, 1}, {0, 0, -1}};
  EXPECT_EQ(geometry_between(Vec3{0, 0, 0}, b).side_at_b, DetectorSide::top);
  const NodePose flipped{{0, 0, 1}, {0, 0, 1}};
  EXPECT_EQ(geometry_between(Vec3{0, 0, 0}, flipped).side_at_b, DetectorSide::bottom);
}

TEST(DetectorSide, OrthogonalArrivalIsTop) {
  const NodePose b{{1, 0, 0}, {0, 1, 0}};
  EXPECT_EQ(geometry_between(Vec3{0, 0, 0}, b).side_at_b, DetectorSide::top);
}

TEST(DetectorSide, RandomPosesMatchDotProductSign) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 a{u(gen), u(gen), u(gen)};
    const NodePose b{{u(gen), u(gen), u(gen)}, {u(gen), u(gen), u(gen)}};
    const double s = (a.x - b.position.x) * b.normal.x + (a.y - b.position.y) * b.normal.y +
                     (a.z - b.position.z) * b.normal.z;
    const auto g = geometry_between(a, b);
    EXPECT_EQ(g.side_at_b, s >= 0 ? DetectorSide::top : DetectorSide::bottom);
    EXPECT_NEAR(norm(g.direction), 1.0, 1e-12);
  }
}

TEST(DetectorSide, CoincidentThrows) {
  EXPECT_THROW(geometry_between(Vec3{1, 1, 1}, NodePose{{1, 1, 1}}), DegenerateGeometry);
}

TEST(Positions, SingleNodeAndSharedCell) {
  const HexGrid one(1.0, {{0, 0, 0}});
  const std::vector<Vec3> a{{0, 0, 0}};
  EXPECT_EQ(assign_positions(a, one)[0], 0u);
  const auto grid = HexGrid::rectangle(1.0, 0, 3, 0, 2);
  const auto ctr = grid.center({2, 1});
  const std::vector<Vec3> pair{{ctr[0] + 0.1, ctr[1], 0}, {ctr[0] - 0.2, ctr[1] + 0.1, 1}};
  const auto ids = assign_positions(pair, grid);
  ASSERT_TRUE(ids[0] && ids[1]);
  EXPECT_EQ(*ids[0], *ids[1]);
  EXPECT_EQ(*ids[0], 6u);
  const std::vector<Vec3> far{{100, 0, 0}};
  EXPECT_FALSE(assign_positions(far, grid)[0].has_value());
}

}  // namespace
}  // namespace invivo
