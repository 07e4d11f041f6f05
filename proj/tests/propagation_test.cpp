#include "fploc/propagation.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "fploc/error.hpp"

namespace fploc {
namespace {

PathLossParams default_params() { return PathLossParams{}; }

TEST(PathLoss, ReferenceDistanceWithDefaultParams) {
  // 40.22 + 0 + 53.73 + 10 * 4.51
  EXPECT_NEAR(path_loss(1.0, default_params()), 139.05, 1e-9);
}

TEST(PathLoss, TenMetersAddsOneDecade) {
  const PathLossParams p = default_params();
  EXPECT_NEAR(path_loss(10.0, p), 139.05 + 16.4, 1e-9);
}

TEST(PathLoss, ConstantTermOnly) {
  PathLossParams p;
  p.l0_db = 40.22;
  p.gamma_pl = 1.0;  // irrelevant at d = 1
  p.lc_db = 0.0;
  p.lw_db = 0.0;
  p.k_walls = 0;
  EXPECT_DOUBLE_EQ(path_loss(1.0, p), 40.22);
}

TEST(PathLoss, ClampsBelowMinDistance) {
  const PathLossParams p = default_params();
  EXPECT_DOUBLE_EQ(path_loss(0.0, p), path_loss(kMinPathDistance, p));
  EXPECT_DOUBLE_EQ(path_loss(0.05, p), path_loss(kMinPathDistance, p));
}

TEST(PathLoss, MonotoneInDistance) {
  const PathLossParams p = default_params();
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double d1 = rng.uniform(kMinPathDistance, 30.0);
    const double d2 = rng.uniform(kMinPathDistance, 30.0);
    const double lo = std::min(d1, d2), hi = std::max(d1, d2);
    EXPECT_LE(path_loss(lo, p), path_loss(hi, p));
  }
}

TEST(PathLossParams, ValidateRejectsBadValues) {
  PathLossParams p;
  p.gamma_pl = 0.0;
  EXPECT_THROW(p.validate(), InvalidInput);
  p = PathLossParams{};
  p.lambda_exp = -1.0;
  EXPECT_THROW(p.validate(), InvalidInput);
  p = PathLossParams{};
  p.k_walls = -1;
  EXPECT_THROW(p.validate(), InvalidInput);
  EXPECT_NO_THROW(PathLossParams{}.validate());
}

TEST(SampleRssi, NeverExceedsNoiselessValue) {
  const PathLossParams p = default_params();
  Rng rng(12);
  const Point2 tx{0.0, 0.0};
  const Point2 rx{3.0, 4.0};
  const double ceiling = p.ptx_dbm - path_loss(5.0, p);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LE(sample_rssi(tx, rx, p, rng), ceiling);
  }
}

TEST(SampleRssi, MonteCarloMeanAtOneMeter) {
  const PathLossParams p = default_params();
  Rng rng(13);
  const Point2 tx{0.0, 0.0};
  const Point2 rx{1.0, 0.0};
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_rssi(tx, rx, p, rng);
  // 20 - 139.05 - E[X], E[X] = 1/0.5 = 2
  EXPECT_NEAR(sum / n, -121.05, 0.1);
}

TEST(SampleRssi, FadingHasExponentialMean) {
  const PathLossParams p = default_params();
  Rng rng(14);
  const Point2 tx{0.0, 0.0};
  const Point2 rx{2.0, 0.0};
  const double noiseless = p.ptx_dbm - path_loss(2.0, p);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += noiseless - sample_rssi(tx, rx, p, rng);
  const double mean = 1.0 / p.lambda_exp;
  const double se = mean / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(sum / n, mean, 3.0 * se);
}

TEST(SampleRssi, Deterministic) {
  const PathLossParams p = default_params();
  Rng a(15), b(15);
  const Point2 tx{0.0, 0.0}, rx{4.0, 2.0};
  for (int i = 0; i < 50; ++i) {
    EXPECT_DOUBLE_EQ(sample_rssi(tx, rx, p, a), sample_rssi(tx, rx, p, b));
  }
}

TEST(Room, DefaultRoomHasCornerAnchors) {
  const Room room = default_room();
  EXPECT_DOUBLE_EQ(room.width, 20.0);
  EXPECT_DOUBLE_EQ(room.height, 10.0);
  ASSERT_EQ(room.ap_positions.size(), 4u);
  for (const Point2& ap : room.ap_positions) {
    EXPECT_TRUE((ap.x == 0.0 || ap.x == 20.0) && (ap.y == 0.0 || ap.y == 10.0))
        << "(" << ap.x << ", " << ap.y << ")";
  }
  EXPECT_TRUE(room.contains({10.0, 5.0}));
  EXPECT_FALSE(room.contains({-0.1, 5.0}));
  EXPECT_FALSE(room.contains({10.0, 10.1}));
}

TEST(Grid, PaperRoomHasTwoHundredCellCenters) {
  const Grid grid = make_square_grid(default_room(), 1.0);
  ASSERT_EQ(grid.points.size(), 200u);
  EXPECT_DOUBLE_EQ(grid.spacing, 1.0);
  EXPECT_DOUBLE_EQ(grid.points.front().x, 0.5);
  EXPECT_DOUBLE_EQ(grid.points.front().y, 0.5);
  for (const Point2& pt : grid.points) {
    EXPECT_TRUE(default_room().contains(pt));
  }
}

TEST(Grid, SmallestRoom) {
  Room room;
  room.width = 2.0;
  room.height = 1.0;
  const Grid grid = make_square_grid(room, 1.0);
  ASSERT_EQ(grid.points.size(), 2u);
  EXPECT_DOUBLE_EQ(grid.points[0].x, 0.5);
  EXPECT_DOUBLE_EQ(grid.points[0].y, 0.5);
  EXPECT_DOUBLE_EQ(grid.points[1].x, 1.5);
  EXPECT_DOUBLE_EQ(grid.points[1].y, 0.5);
}

TEST(Grid, SquareRoomCount) {
  Room room;
  room.width = 10.0;
  room.height = 10.0;
  EXPECT_EQ(make_square_grid(room, 1.0).points.size(), 100u);
}

TEST(Grid, SpacingLargerThanRoomIsAnError) {
  Room room;
  room.width = 20.0;
  room.height = 10.0;
  EXPECT_THROW(make_square_grid(room, 11.0), InvalidInput);
}

TEST(SimulateDatabase, ShapeMatchesGridAndAnchors) {
  const Room room = default_room();
  const Grid grid = make_square_grid(room, 1.0);
  Rng rng(16);
  const auto rows = simulate_database(room, grid, 5, default_params(), rng);
  ASSERT_EQ(rows.size(), 200u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_DOUBLE_EQ(rows[i].location.x, grid.points[i].x);
    EXPECT_DOUBLE_EQ(rows[i].location.y, grid.points[i].y);
    ASSERT_EQ(rows[i].rssi_by_ap.size(), 4u);
    for (const auto& [ap, meas] : rows[i].rssi_by_ap) {
      EXPECT_EQ(meas.size(), 5u) << ap;
    }
  }
  EXPECT_TRUE(rows[0].rssi_by_ap.count("AP1"));
  EXPECT_TRUE(rows[0].rssi_by_ap.count("AP4"));
}

TEST(SimulateDatabase, SingleMeasurementSingleAnchor) {
  Room room;
  room.width = 2.0;
  room.height = 1.0;
  room.ap_positions = {{0.0, 0.0}};
  const Grid grid = make_square_grid(room, 1.0);
  Rng rng(17);
  const auto rows = simulate_database(room, grid, 1, default_params(), rng);
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_EQ(rows[0].rssi_by_ap.size(), 1u);
  EXPECT_EQ(rows[0].rssi_by_ap.at("AP1").size(), 1u);
}

TEST(SimulateDatabase, DeterministicForFixedSeed) {
  const Room room = default_room();
  const Grid grid = make_square_grid(room, 1.0);
  Rng a(18), b(18);
  const auto r1 = simulate_database(room, grid, 5, default_params(), a);
  const auto r2 = simulate_database(room, grid, 5, default_params(), b);
  ASSERT_EQ(r1.size(), r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].rssi_by_ap, r2[i].rssi_by_ap);
  }
}

TEST(SimulateTestSet, PointsStayInsideTheRoom) {
  const Room room = default_room();
  Rng rng(19);
  const auto rows = simulate_test_set(room, 10000, 1, default_params(), rng);
  ASSERT_EQ(rows.size(), 10000u);
  for (const auto& row : rows) {
    ASSERT_TRUE(room.contains(row.location));
    ASSERT_EQ(row.rssi_by_ap.size(), 4u);
  }
}

}  // namespace
}  // namespace fploc
