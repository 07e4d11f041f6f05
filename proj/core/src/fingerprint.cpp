#include "fploc/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fploc/error.hpp"

namespace fploc {

void FingerprintDb::validate() const {
  if (width < 1) throw InvalidInput("fingerprint width must be >= 1");
  const std::size_t d = static_cast<std::size_t>(dim());
  for (const FingerprintRow& row : rows) {
    if (row.features.size() != d)
      throw InvalidInput("fingerprint length " + std::to_string(row.features.size()) +
                         " does not match database dimension " + std::to_string(d));
  }
}

std::vector<std::string> ap_universe(const std::vector<RawMeasurementRow>& rows) {
  std::set<std::string> ids;
  for (const RawMeasurementRow& row : rows) {
    for (const auto& [ap, values] : row.rssi_by_ap) ids.insert(ap);
  }
  return {ids.begin(), ids.end()};
}

FingerprintDb resample_fixed_width(const std::vector<RawMeasurementRow>& rows, int width,
                                   double default_dbm, Rng& rng, int rows_per_point,
                                   const std::vector<std::string>* ap_ids) {
  if (rows.empty()) throw InvalidInput("resample_fixed_width: empty row list");
  if (width < 1) throw InvalidInput("resample_fixed_width: width must be >= 1");
  if (rows_per_point < 1) throw InvalidInput("resample_fixed_width: rows_per_point must be >= 1");

  FingerprintDb db;
  db.ap_ids = ap_ids ? *ap_ids : ap_universe(rows);
  db.width = width;
  db.rows.reserve(rows.size() * rows_per_point);

  for (int rep = 0; rep < rows_per_point; ++rep) {
    for (const RawMeasurementRow& raw : rows) {
      FingerprintRow out;
      out.location = raw.location;
      out.features.reserve(db.dim());
      for (const std::string& ap : db.ap_ids) {
        auto it = raw.rssi_by_ap.find(ap);
        if (it == raw.rssi_by_ap.end() || it->second.empty()) {
          out.features.insert(out.features.end(), width, default_dbm);
        } else {
          const std::vector<double>& pool = it->second;
          for (int k = 0; k < width; ++k) {
            out.features.push_back(pool[rng.below(pool.size())]);
          }
        }
      }
      db.rows.push_back(std::move(out));
    }
  }
  return db;
}

FingerprintDb average_fingerprint(const std::vector<RawMeasurementRow>& rows,
                                  double default_dbm,
                                  const std::vector<std::string>* ap_ids) {
  if (rows.empty()) throw InvalidInput("average_fingerprint: empty row list");

  FingerprintDb db;
  db.ap_ids = ap_ids ? *ap_ids : ap_universe(rows);
  db.width = 1;
  db.rows.reserve(rows.size());
  for (const RawMeasurementRow& raw : rows) {
    FingerprintRow out;
    out.location = raw.location;
    out.features.reserve(db.ap_ids.size());
    for (const std::string& ap : db.ap_ids) {
      auto it = raw.rssi_by_ap.find(ap);
      if (it == raw.rssi_by_ap.end() || it->second.empty()) {
        out.features.push_back(default_dbm);
      } else {
        double sum = 0.0;
        for (double v : it->second) sum += v;
        out.features.push_back(sum / static_cast<double>(it->second.size()));
      }
    }
    db.rows.push_back(std::move(out));
  }
  return db;
}

FingerprintDb normalize(const FingerprintDb& db, NormMode mode) {
  if (db.norm.mode != NormMode::none)
    throw InvalidInput("normalize: database is already normalized");
  if (db.rows.empty()) throw InvalidInput("normalize: empty database");
  if (mode == NormMode::none) return db;

  FingerprintDb out = db;
  const std::size_t d = static_cast<std::size_t>(db.dim());

  if (mode == NormMode::minmax) {
    double lo = db.rows.front().features.front();
    double hi = lo;
    for (const FingerprintRow& row : db.rows) {
      for (double v : row.features) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    out.norm.mode = NormMode::minmax;
    out.norm.x_min = lo;
    out.norm.x_max = hi;
  } else {
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    const double n = static_cast<double>(db.rows.size());
    for (const FingerprintRow& row : db.rows) {
      for (std::size_t j = 0; j < d; ++j) mean[j] += row.features[j];
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= n;
    for (const FingerprintRow& row : db.rows) {
      for (std::size_t j = 0; j < d; ++j) {
        const double dev = row.features[j] - mean[j];
        var[j] += dev * dev;
      }
    }
    out.norm.mode = NormMode::zscore;
    out.norm.feature_mean = std::move(mean);
    out.norm.feature_std.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double s = std::sqrt(var[j] / n);
      // Constant columns stay inert instead of dividing by zero.
      out.norm.feature_std[j] = s > 0.0 ? s : 1.0;
    }
  }

  for (FingerprintRow& row : out.rows) {
    row.features = apply_normalization(out.norm, row.features);
  }
  return out;
}

std::vector<double> apply_normalization(const Normalization& norm,
                                        const std::vector<double>& features) {
  std::vector<double> out(features.size());
  switch (norm.mode) {
    case NormMode::none:
      out = features;
      break;
    case NormMode::minmax: {
      const double range = norm.x_max - norm.x_min;
      const double denom = range > 0.0 ? range : 1.0;
      for (std::size_t j = 0; j < features.size(); ++j)
        out[j] = (features[j] - norm.x_min) / denom;
      break;
    }
    case NormMode::zscore: {
      if (features.size() != norm.feature_mean.size())
        throw InvalidInput("apply_normalization: feature length mismatch");
      for (std::size_t j = 0; j < features.size(); ++j)
        out[j] = (features[j] - norm.feature_mean[j]) / norm.feature_std[j];
      break;
    }
  }
  return out;
}

std::vector<double> denormalize(const Normalization& norm,
                                const std::vector<double>& features) {
  std::vector<double> out(features.size());
  switch (norm.mode) {
    case NormMode::none:
      out = features;
      break;
    case NormMode::minmax: {
      const double range = norm.x_max - norm.x_min;
      const double denom = range > 0.0 ? range : 1.0;
      for (std::size_t j = 0; j < features.size(); ++j)
        out[j] = features[j] * denom + norm.x_min;
      break;
    }
    case NormMode::zscore: {
      if (features.size() != norm.feature_mean.size())
        throw InvalidInput("denormalize: feature length mismatch");
      for (std::size_t j = 0; j < features.size(); ++j)
        out[j] = features[j] * norm.feature_std[j] + norm.feature_mean[j];
      break;
    }
  }
  return out;
}

FingerprintDb augment_permute(const FingerprintDb& db, int times, Rng& rng) {
  if (times < 0) throw InvalidInput("augment_permute: times must be >= 0");
  db.validate();

  FingerprintDb out = db;
  out.rows.reserve(db.rows.size() * (times + 1));
  const std::size_t n_aps = db.ap_ids.size();
  for (int t = 0; t < times; ++t) {
    for (const FingerprintRow& row : db.rows) {
      FingerprintRow copy = row;
      for (std::size_t a = 0; a < n_aps; ++a) {
        double* slots = copy.features.data() + a * db.width;
        // Fisher-Yates on this anchor's slots.
        for (int i = db.width; i > 1; --i) {
          std::swap(slots[i - 1], slots[rng.below(i)]);
        }
      }
      out.rows.push_back(std::move(copy));
    }
  }
  return out;
}

int voronoi_class_of(const Grid& grid, const Point2& point) {
  if (grid.points.empty()) throw InvalidInput("voronoi_class_of: empty grid");
  int best = 0;
  double best_d = distance(grid.points[0], point);
  for (std::size_t i = 1; i < grid.points.size(); ++i) {
    const double d = distance(grid.points[i], point);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

void assign_voronoi_labels(FingerprintDb& db, const Grid& grid) {
  for (FingerprintRow& row : db.rows) {
    row.class_label = voronoi_class_of(grid, row.location);
  }
}

std::pair<FingerprintDb, FingerprintDb> split_train_validation(const FingerprintDb& db,
                                                               double fraction, Rng& rng) {
  if (db.rows.size() < 2) throw InvalidInput("split_train_validation: need at least 2 rows");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw InvalidInput("split_train_validation: fraction must be in (0, 1)");

  std::vector<std::size_t> order(db.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  const std::size_t n_train =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(db.rows.size())));

  FingerprintDb train = db;
  FingerprintDb val = db;
  train.rows.clear();
  val.rows.clear();
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? train : val).rows.push_back(db.rows[order[i]]);
  }
  return {std::move(train), std::move(val)};
}

}  // namespace fploc
