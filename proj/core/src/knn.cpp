#include "fploc/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fploc/error.hpp"

namespace fploc {

double euclidean_distance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw InvalidInput("euclidean_distance: lengths " + std::to_string(x.size()) +
                       " vs " + std::to_string(y.size()));
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - y[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

// Indices of the k nearest rows, ordered by (distance, row index).
std::vector<std::size_t> nearest_rows(const FingerprintDb& db,
                                      const std::vector<double>& x, int k) {
  if (db.rows.empty()) throw InvalidInput("knn: empty database");
  if (k < 1) throw InvalidInput("knn: k must be >= 1");
  if (static_cast<std::size_t>(k) > db.rows.size())
    throw InvalidInput("knn: k exceeds row count");

  std::vector<double> dist(db.rows.size());
  for (std::size_t i = 0; i < db.rows.size(); ++i)
    dist[i] = euclidean_distance(db.rows[i].features, x);

  std::vector<std::size_t> order(db.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto by_dist_then_row = [&dist](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), by_dist_then_row);
  order.resize(static_cast<std::size_t>(k));
  return order;
}

}  // namespace

Point2 knn_localize(const FingerprintDb& db, const std::vector<double>& x,
                    const KnnConfig& cfg) {
  const std::vector<std::size_t> nn = nearest_rows(db, x, cfg.k);

  if (cfg.weighting == KnnWeighting::inverse_distance) {
    bool exact = false;
    for (std::size_t i : nn)
      if (euclidean_distance(db.rows[i].features, x) == 0.0) exact = true;
    if (exact) {
      Point2 sum{0.0, 0.0};
      int count = 0;
      for (std::size_t i : nn) {
        if (euclidean_distance(db.rows[i].features, x) == 0.0) {
          sum.x += db.rows[i].location.x;
          sum.y += db.rows[i].location.y;
          ++count;
        }
      }
      return {sum.x / count, sum.y / count};
    }
    double wsum = 0.0;
    Point2 acc{0.0, 0.0};
    for (std::size_t i : nn) {
      const double w = 1.0 / euclidean_distance(db.rows[i].features, x);
      acc.x += w * db.rows[i].location.x;
      acc.y += w * db.rows[i].location.y;
      wsum += w;
    }
    return {acc.x / wsum, acc.y / wsum};
  }

  Point2 acc{0.0, 0.0};
  for (std::size_t i : nn) {
    acc.x += db.rows[i].location.x;
    acc.y += db.rows[i].location.y;
  }
  const double k = static_cast<double>(nn.size());
  return {acc.x / k, acc.y / k};
}

int knn_classify(const FingerprintDb& db, const std::vector<double>& x,
                 const KnnConfig& cfg) {
  const std::vector<std::size_t> nn = nearest_rows(db, x, cfg.k);
  std::map<int, int> votes;
  for (std::size_t i : nn) {
    if (db.rows[i].class_label < 0)
      throw InvalidInput("knn_classify: row without class label");
    ++votes[db.rows[i].class_label];
  }
  int best_label = -1;
  int best_count = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_count) {  // map iterates ascending: ties keep the smaller label
      best_count = count;
      best_label = label;
    }
  }
  return best_label;
}

}  // namespace fploc
