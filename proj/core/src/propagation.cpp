#include "fploc/propagation.hpp"

#include <cmath>
#include <string>

#include "fploc/error.hpp"

namespace fploc {

void PathLossParams::validate() const {
  if (!(gamma_pl > 0.0)) throw InvalidInput("path-loss exponent must be > 0");
  if (!(lambda_exp > 0.0)) throw InvalidInput("fading rate must be > 0");
  if (k_walls < 0) throw InvalidInput("wall count must be >= 0");
}

Room default_room() {
  Room room;
  room.width = 20.0;
  room.height = 10.0;
  room.ap_positions = {{0.0, 0.0}, {20.0, 0.0}, {0.0, 10.0}, {20.0, 10.0}};
  return room;
}

double path_loss(double d, const PathLossParams& p) {
  if (!std::isfinite(d)) throw InvalidInput("path_loss: distance is not finite");
  if (d < 0.0) throw InvalidInput("path_loss: distance is negative");
  const double dc = std::max(d, kMinPathDistance);
  return p.l0_db + 10.0 * p.gamma_pl * std::log10(dc) + p.lc_db + p.k_walls * p.lw_db;
}

double sample_rssi(const Point2& tx, const Point2& rx, const PathLossParams& p, Rng& rng) {
  const double d = distance(tx, rx);
  return p.ptx_dbm - path_loss(d, p) - rng.exponential(p.lambda_exp);
}

Grid make_square_grid(const Room& room, double spacing) {
  if (!(room.width > 0.0) || !(room.height > 0.0))
    throw InvalidInput("make_square_grid: room sides must be positive");
  if (!(spacing > 0.0)) throw InvalidInput("make_square_grid: spacing must be positive");

  const int nx = static_cast<int>(std::floor(room.width / spacing + 1e-9));
  const int ny = static_cast<int>(std::floor(room.height / spacing + 1e-9));
  if (nx < 1 || ny < 1)
    throw InvalidInput("make_square_grid: spacing " + std::to_string(spacing) +
                       " leaves no cell in a " + std::to_string(room.width) + " x " +
                       std::to_string(room.height) + " room");

  Grid grid;
  grid.spacing = spacing;
  grid.points.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      grid.points.push_back({(i + 0.5) * spacing, (j + 0.5) * spacing});
    }
  }
  return grid;
}

namespace {

RawMeasurementRow measure_at(const Point2& where, const Room& room, int m_per_ap,
                             const PathLossParams& p, Rng& rng) {
  RawMeasurementRow row;
  row.location = where;
  for (std::size_t a = 0; a < room.ap_positions.size(); ++a) {
    std::string ap_id = "AP" + std::to_string(a + 1);
    std::vector<double> values(m_per_ap);
    for (int m = 0; m < m_per_ap; ++m) {
      values[m] = sample_rssi(room.ap_positions[a], where, p, rng);
    }
    row.rssi_by_ap.emplace(std::move(ap_id), std::move(values));
  }
  return row;
}

}  // namespace

std::vector<RawMeasurementRow> simulate_database(const Room& room, const Grid& grid,
                                                 int m_per_ap, const PathLossParams& p,
                                                 Rng& rng) {
  p.validate();
  if (grid.points.empty()) throw InvalidInput("simulate_database: empty grid");
  if (m_per_ap < 1) throw InvalidInput("simulate_database: m_per_ap must be >= 1");
  if (room.ap_positions.empty()) throw InvalidInput("simulate_database: room has no APs");

  std::vector<RawMeasurementRow> rows;
  rows.reserve(grid.points.size());
  for (const Point2& v : grid.points) {
    rows.push_back(measure_at(v, room, m_per_ap, p, rng));
  }
  return rows;
}

std::vector<RawMeasurementRow> simulate_test_set(const Room& room, int n, int m_per_ap,
                                                 const PathLossParams& p, Rng& rng) {
  p.validate();
  if (!(room.width > 0.0) || !(room.height > 0.0))
    throw InvalidInput("simulate_test_set: room sides must be positive");
  if (n < 1) throw InvalidInput("simulate_test_set: n must be >= 1");
  if (m_per_ap < 1) throw InvalidInput("simulate_test_set: m_per_ap must be >= 1");

  std::vector<RawMeasurementRow> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    Point2 u{rng.uniform(0.0, room.width), rng.uniform(0.0, room.height)};
    rows.push_back(measure_at(u, room, m_per_ap, p, rng));
  }
  return rows;
}

}  // namespace fploc
