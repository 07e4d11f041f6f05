#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fploc/fingerprint.hpp"
#include "fploc/knn.hpp"
#include "fploc/mlp.hpp"
#include "fploc/model_io.hpp"
#include "fploc/propagation.hpp"
#include "fploc/report.hpp"
#include "fploc/svm.hpp"

namespace fploc {

// Full description of one study: dataset, fingerprint pipeline, engine,
// hyperparameters, seeds. Maps 1:1 onto the key=value config format.
struct ExperimentSpec {
  // dataset
  std::string dataset = "simulated";  // simulated | uji | tkn
  double room_width = 20.0;
  double room_height = 10.0;
  double grid_spacing = 1.0;
  int meas_per_ap = 5;
  int n_test = 1000;
  PathLossParams path_loss;
  std::string uji_train;
  std::string uji_test;
  int building = 0;
  int floor = 0;
  std::string tkn_path;

  // fingerprint pipeline
  std::string fingerprint = "resample";  // average | resample
  int width = 5;
  int rows_per_point = 5;
  int test_rows_per_point = 1;
  NormMode normalization = NormMode::minmax;
  int augment_times = 0;
  // NaN = auto: corpus minimum - 1 dB for simulated data, -110 otherwise.
  double default_dbm = std::numeric_limits<double>::quiet_NaN();

  // engine
  std::string engine = "ed_knn";  // ed_knn | svm | nn | ae_ed | ae_svm
  KnnConfig knn;
  double svm_c = 1.0;
  double svm_gamma = 0.25;
  int k_top = 3;
  double smo_tol = 1e-3;
  TrainConfig nn;
  double train_fraction = 0.7;
  int code_dim = 5;
  double ae_alpha = 1.0;
  int ae_batch = 50;
  int ae_epochs = 200;
  int ae_patience = 20;

  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  // Optional acceptance band on the pooled mean, used by bench --check.
  double check_mean_min = std::numeric_limits<double>::quiet_NaN();
  double check_mean_max = std::numeric_limits<double>::quiet_NaN();

  void validate() const;
};

ExperimentSpec parse_experiment_text(const std::string& text, const std::string& name);
ExperimentSpec parse_experiment_file(const std::string& path);

// The resolved spec as ordered key=value pairs (deterministic rendering).
std::vector<std::pair<std::string, std::string>> spec_echo(const ExperimentSpec& spec);

// Trains the spec's engine on the spec's dataset under one seed.
ModelBundle train_bundle(const ExperimentSpec& spec, std::uint64_t seed);

// Localization errors (meters) of a bundle on raw test measurements.
std::vector<double> evaluate_bundle(const ModelBundle& bundle,
                                    const std::vector<RawMeasurementRow>& test_rows,
                                    int test_rows_per_point, std::uint64_t seed);

// Errors on an already-built fingerprint database (features pre-normalized).
std::vector<double> evaluate_bundle_db(const ModelBundle& bundle,
                                       const FingerprintDb& test_db);

SeedResult run_experiment_seed(const ExperimentSpec& spec, std::uint64_t seed);
ExperimentReport run_experiment(const ExperimentSpec& spec);

// True when the pooled mean lies inside the spec's check band (if any).
bool check_report(const ExperimentSpec& spec, const ExperimentReport& report);

}  // namespace fploc
