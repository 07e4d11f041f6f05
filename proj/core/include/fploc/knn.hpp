#pragma once

#include <vector>

#include "fploc/fingerprint.hpp"
#include "fploc/geometry.hpp"

namespace fploc {

enum class KnnWeighting { uniform, inverse_distance };

struct KnnConfig {
  int k = 3;
  KnnWeighting weighting = KnnWeighting::uniform;
};

double euclidean_distance(const std::vector<double>& x, const std::vector<double>& y);

// Weighted combination of the k nearest training locations.
// Distance ties keep row order. Inverse-distance weighting degenerates to the
// mean of the exact matches when any selected distance is zero.
Point2 knn_localize(const FingerprintDb& db, const std::vector<double>& x,
                    const KnnConfig& cfg);

// Modal class label among the k nearest rows; ties pick the smallest label.
int knn_classify(const FingerprintDb& db, const std::vector<double>& x,
                 const KnnConfig& cfg);

}  // namespace fploc
