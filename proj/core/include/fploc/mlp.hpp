#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fploc/fingerprint.hpp"
#include "fploc/geometry.hpp"
#include "fploc/rng.hpp"

namespace fploc {

enum class Activation { relu, linear, sigmoid };

// Layer i maps n(i) -> n(i+1): weights[i] is n(i+1) x n(i), biases[i] is n(i+1).
// keep_prob applies to the layer's post-activation output: train mode samples a
// Bernoulli keep-mask, eval mode scales the activation by p (no inversion).
struct MlpModel {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::vector<Activation> activations;
  std::vector<double> keep_prob;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }
  void validate() const;
};

enum class Optimizer { sgd, momentum, adagrad, rmsprop, adam };
enum class Penalty { none, l1, l2 };

struct TrainConfig {
  Optimizer optimizer = Optimizer::adam;
  double alpha = 0.001;
  double rho = 0.9;        // momentum coefficient / adam first moment
  double gamma_d = 0.999;  // rmsprop / adam second-moment decay
  double eps = 1e-8;
  int batch_size = 100;
  int max_epochs = 500;
  int patience = 20;
  Penalty penalty = Penalty::l2;
  double lambda_r = 0.03;
  std::uint64_t seed = 1;
  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_error_m;
  int best_epoch = -1;  // 0-based index into the epoch vectors
  std::string stop_reason;
};

// N(0, 2/fan_in) entries, fan_in = cols; deterministic fill order.
Eigen::MatrixXd he_init(int rows, int cols, Rng& rng);

MlpModel make_mlp(const std::vector<int>& sizes, const std::vector<Activation>& act,
                  const std::vector<double>& keep, Rng& rng);

// input_dim -> 500 -> 500 -> 500 -> 2, ReLU hidden with keep 0.5, linear output.
MlpModel build_regression_net(int input_dim, Rng& rng);

// input_dim -> code_dim (sigmoid) -> input_dim (linear).
MlpModel build_autoencoder(int input_dim, int code_dim, Rng& rng);

struct ForwardCache {
  std::vector<Eigen::MatrixXd> layer_in;  // input fed to each layer
  std::vector<Eigen::MatrixXd> z;         // pre-activations
  std::vector<Eigen::MatrixXd> raw;       // post-activation, pre-mask
  std::vector<Eigen::MatrixXd> mask;      // keep masks; empty matrix when p = 1
  Eigen::MatrixXd outputs;                // post-mask output of the last layer
};

Eigen::MatrixXd forward_eval(const MlpModel& m, const Eigen::MatrixXd& batch);
Eigen::MatrixXd forward_train(const MlpModel& m, const Eigen::MatrixXd& batch, Rng& rng,
                              ForwardCache& cache);
// Forward with externally fixed masks (for gradient checks).
Eigen::MatrixXd forward_with_masks(const MlpModel& m, const Eigen::MatrixXd& batch,
                                   const std::vector<Eigen::MatrixXd>& masks);

// Mean over batch entries (rows x output dims).
double mse(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets);
// (lambda/2)*sum of squared weights for l2, lambda*sum |w| for l1; biases excluded.
double penalty_value(const MlpModel& m, Penalty p, double lambda_r);
// Eval-mode loss: mse(forward_eval) + penalty.
double loss(const MlpModel& m, const Eigen::MatrixXd& batch,
            const Eigen::MatrixXd& targets, Penalty p, double lambda_r);
double loss_with_masks(const MlpModel& m, const Eigen::MatrixXd& batch,
                       const Eigen::MatrixXd& targets,
                       const std::vector<Eigen::MatrixXd>& masks, Penalty p,
                       double lambda_r);

struct Gradients {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
};

// Exact gradients of the masked loss; ReLU'(0) = 0, sign(0) = 0.
Gradients backprop(const MlpModel& m, const ForwardCache& cache,
                   const Eigen::MatrixXd& targets, Penalty p, double lambda_r);

struct OptimizerState {
  std::vector<Eigen::MatrixXd> w_a, w_b;  // velocity / first moment, accumulator / second
  std::vector<Eigen::VectorXd> b_a, b_b;
  long step_count = 0;
};

OptimizerState make_optimizer_state(const MlpModel& m);
void optimizer_step(MlpModel& m, OptimizerState& state, const Gradients& g,
                    const TrainConfig& cfg);

enum class ValMetric { location_error_m, mse };

// Mini-batch training with per-epoch validation, best-weight snapshot, and
// patience-based early stopping. Returns the snapshot at the best epoch.
TrainHistory train_on_matrices(MlpModel& m, const Eigen::MatrixXd& x_train,
                               const Eigen::MatrixXd& y_train,
                               const Eigen::MatrixXd& x_val,
                               const Eigen::MatrixXd& y_val, const TrainConfig& cfg,
                               ValMetric metric);

// Fingerprint features -> locations; validation metric is mean error in meters.
TrainHistory train(MlpModel& m, const FingerprintDb& train_db,
                   const FingerprintDb& val_db, const TrainConfig& cfg);

// Continues training from the given weights; contract identical to train.
TrainHistory fine_tune(MlpModel& m, const FingerprintDb& train_db,
                       const FingerprintDb& val_db, const TrainConfig& cfg);

std::vector<Point2> predict(const MlpModel& m, const FingerprintDb& db);

// Code-layer activation of an autoencoder (first layer, eval mode).
Eigen::MatrixXd encode(const MlpModel& m, const Eigen::MatrixXd& batch);

// Replaces each row's features with its autoencoder code.
FingerprintDb encode_db(const MlpModel& m, const FingerprintDb& db);

Eigen::MatrixXd features_matrix(const FingerprintDb& db);
Eigen::MatrixXd locations_matrix(const FingerprintDb& db);

}  // namespace fploc
