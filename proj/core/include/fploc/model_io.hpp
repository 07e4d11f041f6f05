#pragma once

#include <string>

#include "fploc/fingerprint.hpp"
#include "fploc/knn.hpp"
#include "fploc/mlp.hpp"
#include "fploc/svm.hpp"

namespace fploc {

// A trained engine together with everything needed to turn raw measurements
// into query fingerprints: anchor universe, width, normalization, defaults.
struct ModelBundle {
  std::string engine;                        // ed_knn | svm | nn | ae_ed | ae_svm
  std::string fingerprint_mode = "average";  // average | resample
  int width = 1;
  double default_dbm = -110.0;
  std::vector<std::string> ap_ids;
  Normalization norm;

  bool has_knn_db = false;
  KnnConfig knn_cfg;
  FingerprintDb knn_db;  // matching space; code space for autoencoder engines

  bool has_ovo = false;
  OvoModel ovo;
  int k_top = 3;

  bool has_mlp = false;
  MlpModel mlp;

  bool has_ae = false;
  MlpModel autoencoder;
};

// Versioned text format, numbers in shortest round-trip decimal form.
void save_model(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model(const std::string& path);

}  // namespace fploc
