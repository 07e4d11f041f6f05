#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fploc/geometry.hpp"
#include "fploc/rng.hpp"

namespace fploc {

// One surveyed location with its raw per-anchor measurement lists. Lists may
// be empty or of unequal lengths; that is the point of the type.
struct RawMeasurementRow {
  Point2 location;
  std::map<std::string, std::vector<double>> rssi_by_ap;
};

enum class NormMode { none, minmax, zscore };

// Parameters of the transform applied to a database, kept so the same
// transform can be applied to test fingerprints and inverted.
struct Normalization {
  NormMode mode = NormMode::none;
  double x_min = 0.0;                // minmax: global extremes
  double x_max = 0.0;
  std::vector<double> feature_mean;  // zscore: per feature column
  std::vector<double> feature_std;
};

struct FingerprintRow {
  Point2 location;
  std::vector<double> features;  // ap-major: ap_ids[0] slots, then ap_ids[1], ...
  int class_label = -1;          // grid index; -1 when unlabeled
};

// Fixed-width fingerprint database: every row has width slots per anchor in
// ap_ids order, dimension ap_ids.size() * width.
struct FingerprintDb {
  std::vector<std::string> ap_ids;
  int width = 1;
  std::vector<FingerprintRow> rows;
  Normalization norm;

  int dim() const { return static_cast<int>(ap_ids.size()) * width; }
  bool empty() const { return rows.empty(); }
  void validate() const;  // throws InvalidInput on shape violations
};

// Provenance of a loaded dataset.
struct DatasetMeta {
  enum class Source { simulated, uji, tkn };
  Source source = Source::simulated;
  double room_width = 0.0;
  double room_height = 0.0;
  Point2 coordinate_offset;             // subtracted from absolute positions
  std::vector<std::string> pruned_aps;  // anchors dropped as never detected
};

// Sorted union of anchor ids over all rows.
std::vector<std::string> ap_universe(const std::vector<RawMeasurementRow>& rows);

// Draws `width` values per anchor with replacement from that anchor's
// multiset; anchors with no measurements get default_dbm in every slot.
// rows_per_point resampled fingerprints are built from each raw row. When
// ap_ids is given (e.g. to align test rows with a training universe) it
// overrides the universe derived from the rows.
FingerprintDb resample_fixed_width(const std::vector<RawMeasurementRow>& rows, int width,
                                   double default_dbm, Rng& rng, int rows_per_point = 1,
                                   const std::vector<std::string>* ap_ids = nullptr);

// Width-1 database of per-anchor means; anchors missing from a row get
// default_dbm.
FingerprintDb average_fingerprint(const std::vector<RawMeasurementRow>& rows,
                                  double default_dbm,
                                  const std::vector<std::string>* ap_ids = nullptr);

// Returns a copy with the transform applied and its parameters recorded.
// minmax maps the global extremes to 0 and 1; zscore standardizes each
// feature column. Constant features (zero range or zero column std) map to
// all zeros, with the divisor recorded as 1.
FingerprintDb normalize(const FingerprintDb& db, NormMode mode);

// Applies recorded parameters to one feature vector (for test fingerprints).
std::vector<double> apply_normalization(const Normalization& norm,
                                        const std::vector<double>& features);

// Inverse transform; round-trips within 1e-9.
std::vector<double> denormalize(const Normalization& norm,
                                const std::vector<double>& features);

// Appends `times` copies of every row with each anchor's slots independently
// permuted; originals are retained, locations and labels are kept.
FingerprintDb augment_permute(const FingerprintDb& db, int times, Rng& rng);

// Index of the geometrically nearest grid point; ties go to the lowest index.
int voronoi_class_of(const Grid& grid, const Point2& point);

// Labels every row with its Voronoi class over the given grid.
void assign_voronoi_labels(FingerprintDb& db, const Grid& grid);

// Disjoint random partition; the train part gets floor(fraction * n) rows.
std::pair<FingerprintDb, FingerprintDb> split_train_validation(const FingerprintDb& db,
                                                               double fraction, Rng& rng);

}  // namespace fploc
