#pragma once

#include <vector>

#include "fploc/fingerprint.hpp"
#include "fploc/geometry.hpp"
#include "fploc/rng.hpp"

namespace fploc {

// Multi-wall log-distance path-loss model with exponential fading.
struct PathLossParams {
  double l0_db = 40.22;      // constant loss at 1 m
  double gamma_pl = 1.64;    // path-loss exponent
  double lc_db = 53.73;      // multi-wall constant
  double lw_db = 4.51;       // attenuation per wall
  int k_walls = 10;          // wall count, applied uniformly
  double lambda_exp = 0.5;   // fading rate (1/dB)
  double ptx_dbm = 20.0;     // transmit power

  void validate() const;
};

// Distances below this are clamped before the log term; the loss would
// otherwise diverge at the anchor positions.
inline constexpr double kMinPathDistance = 0.1;

// 20 m x 10 m room with one AP in each corner.
Room default_room();

// l0 + 10*gamma*log10(d) + lc + k*lw, in dB. d is clamped to kMinPathDistance.
double path_loss(double d, const PathLossParams& p);

// One RSSI draw at rx for a transmitter at tx: ptx - L(d) - X, X ~ Exp(lambda).
double sample_rssi(const Point2& tx, const Point2& rx, const PathLossParams& p, Rng& rng);

// Lattice of cell centers with the given spacing, row by row from the origin
// corner. A 20x10 room at 1 m spacing yields 200 points.
Grid make_square_grid(const Room& room, double spacing);

// One row per grid point with m_per_ap draws from every anchor.
std::vector<RawMeasurementRow> simulate_database(const Room& room, const Grid& grid,
                                                 int m_per_ap, const PathLossParams& p,
                                                 Rng& rng);

// n rows at locations drawn uniformly over the room, fingerprinted like
// training rows.
std::vector<RawMeasurementRow> simulate_test_set(const Room& room, int n, int m_per_ap,
                                                 const PathLossParams& p, Rng& rng);

}  // namespace fploc
