#include "fploc/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fploc/error.hpp"

namespace fploc {

void MlpModel::validate() const {
  const std::size_t n = weights.size();
  if (n == 0) throw InvalidInput("mlp: no layers");
  if (biases.size() != n || activations.size() != n || keep_prob.size() != n)
    throw InvalidInput("mlp: per-layer field counts disagree");
  for (std::size_t i = 0; i < n; ++i) {
    if (biases[i].size() != weights[i].rows())
      throw InvalidInput("mlp: bias length mismatch at layer " + std::to_string(i));
    if (i > 0 && weights[i].cols() != weights[i - 1].rows())
      throw InvalidInput("mlp: weight shapes do not chain at layer " +
                         std::to_string(i));
    if (!(keep_prob[i] > 0.0 && keep_prob[i] <= 1.0))
      throw InvalidInput("mlp: keep probability must be in (0,1]");
  }
}

void TrainConfig::validate() const {
  if (!(alpha > 0.0)) throw InvalidInput("train config: alpha must be > 0");
  if (batch_size < 1) throw InvalidInput("train config: batch size must be >= 1");
  if (max_epochs < 0) throw InvalidInput("train config: max epochs must be >= 0");
  if (patience < 1) throw InvalidInput("train config: patience must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidInput("train config: rho in [0,1)");
  if (!(gamma_d > 0.0 && gamma_d < 1.0))
    throw InvalidInput("train config: gamma_d in (0,1)");
  if (eps < 0.0) throw InvalidInput("train config: eps must be >= 0");
  if (lambda_r < 0.0) throw InvalidInput("train config: lambda must be >= 0");
}

Eigen::MatrixXd he_init(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw InvalidInput("he_init: empty shape");
  const double sd = std::sqrt(2.0 / static_cast<double>(cols));
  Eigen::MatrixXd w(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) w(i, j) = sd * rng.normal();
  return w;
}

MlpModel make_mlp(const std::vector<int>& sizes, const std::vector<Activation>& act,
                  const std::vector<double>& keep, Rng& rng) {
  if (sizes.size() < 2) throw InvalidInput("make_mlp: need at least one layer");
  if (act.size() != sizes.size() - 1 || keep.size() != sizes.size() - 1)
    throw InvalidInput("make_mlp: activation/keep counts must equal layer count");
  MlpModel m;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    m.weights.push_back(he_init(sizes[i + 1], sizes[i], rng));
    m.biases.push_back(Eigen::VectorXd::Zero(sizes[i + 1]));
    m.activations.push_back(act[i]);
    m.keep_prob.push_back(keep[i]);
  }
  m.validate();
  return m;
}

MlpModel build_regression_net(int input_dim, Rng& rng) {
  return make_mlp({input_dim, 500, 500, 500, 2},
                  {Activation::relu, Activation::relu, Activation::relu,
                   Activation::linear},
                  {0.5, 0.5, 0.5, 1.0}, rng);
}

MlpModel build_autoencoder(int input_dim, int code_dim, Rng& rng) {
  if (!(code_dim >= 1 && code_dim < input_dim))
    throw InvalidInput("autoencoder: need 1 <= code_dim < input_dim");
  return make_mlp({input_dim, code_dim, input_dim},
                  {Activation::sigmoid, Activation::linear}, {1.0, 1.0}, rng);
}

namespace {

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& z) {
  switch (act) {
    case Activation::relu:
      return z.cwiseMax(0.0);
    case Activation::linear:
      return z;
    case Activation::sigmoid:
      return ((-z.array()).exp() + 1.0).inverse().matrix();
  }
  throw Error("unreachable activation");
}

// Derivative in terms of z and act(z); ReLU'(0) = 0.
Eigen::MatrixXd activation_grad(Activation act, const Eigen::MatrixXd& z,
                                const Eigen::MatrixXd& a) {
  switch (act) {
    case Activation::relu:
      return (z.array() > 0.0).cast<double>().matrix();
    case Activation::linear:
      return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    case Activation::sigmoid:
      return (a.array() * (1.0 - a.array())).matrix();
  }
  throw Error("unreachable activation");
}

Eigen::MatrixXd layer_z(const MlpModel& m, int layer, const Eigen::MatrixXd& input) {
  return (input * m.weights[layer].transpose()).rowwise() +
         m.biases[layer].transpose();
}

}  // namespace

Eigen::MatrixXd forward_eval(const MlpModel& m, const Eigen::MatrixXd& batch) {
  m.validate();
  if (batch.cols() != m.input_dim())
    throw InvalidInput("forward: input width " + std::to_string(batch.cols()) +
                       " != " + std::to_string(m.input_dim()));
  Eigen::MatrixXd a = batch;
  for (int i = 0; i < m.num_layers(); ++i) {
    a = apply_activation(m.activations[i], layer_z(m, i, a));
    if (m.keep_prob[i] < 1.0) a *= m.keep_prob[i];
  }
  return a;
}

Eigen::MatrixXd forward_train(const MlpModel& m, const Eigen::MatrixXd& batch, Rng& rng,
                              ForwardCache& cache) {
  m.validate();
  if (batch.cols() != m.input_dim())
    throw InvalidInput("forward: input width " + std::to_string(batch.cols()) +
                       " != " + std::to_string(m.input_dim()));
  const int n_layers = m.num_layers();
  cache.layer_in.assign(n_layers, {});
  cache.z.assign(n_layers, {});
  cache.raw.assign(n_layers, {});
  cache.mask.assign(n_layers, {});

  Eigen::MatrixXd a = batch;
  for (int i = 0; i < n_layers; ++i) {
    cache.layer_in[i] = a;
    cache.z[i] = layer_z(m, i, a);
    cache.raw[i] = apply_activation(m.activations[i], cache.z[i]);
    if (m.keep_prob[i] < 1.0) {
      Eigen::MatrixXd mask(cache.raw[i].rows(), cache.raw[i].cols());
      for (Eigen::Index r = 0; r < mask.rows(); ++r)
        for (Eigen::Index c = 0; c < mask.cols(); ++c)
          mask(r, c) = rng.uniform() < m.keep_prob[i] ? 1.0 : 0.0;
      cache.mask[i] = std::move(mask);
      a = cache.raw[i].cwiseProduct(cache.mask[i]);
    } else {
      a = cache.raw[i];
    }
  }
  cache.outputs = a;
  return a;
}

Eigen::MatrixXd forward_with_masks(const MlpModel& m, const Eigen::MatrixXd& batch,
                                   const std::vector<Eigen::MatrixXd>& masks) {
  if (static_cast<int>(masks.size()) != m.num_layers())
    throw InvalidInput("forward_with_masks: mask count mismatch");
  Eigen::MatrixXd a = batch;
  for (int i = 0; i < m.num_layers(); ++i) {
    a = apply_activation(m.activations[i], layer_z(m, i, a));
    if (masks[i].size() > 0) a = a.cwiseProduct(masks[i]);
  }
  return a;
}

double mse(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) {
  if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
    throw InvalidInput("mse: shape mismatch");
  if (outputs.size() == 0) throw InvalidInput("mse: empty batch");
  return (outputs - targets).squaredNorm() / static_cast<double>(outputs.size());
}

double penalty_value(const MlpModel& m, Penalty p, double lambda_r) {
  if (p == Penalty::none) return 0.0;
  double acc = 0.0;
  for (const Eigen::MatrixXd& w : m.weights) {
    acc += p == Penalty::l2 ? w.squaredNorm() : w.cwiseAbs().sum();
  }
  return p == Penalty::l2 ? 0.5 * lambda_r * acc : lambda_r * acc;
}

double loss(const MlpModel& m, const Eigen::MatrixXd& batch,
            const Eigen::MatrixXd& targets, Penalty p, double lambda_r) {
  return mse(forward_eval(m, batch), targets) + penalty_value(m, p, lambda_r);
}

double loss_with_masks(const MlpModel& m, const Eigen::MatrixXd& batch,
                       const Eigen::MatrixXd& targets,
                       const std::vector<Eigen::MatrixXd>& masks, Penalty p,
                       double lambda_r) {
  return mse(forward_with_masks(m, batch, masks), targets) +
         penalty_value(m, p, lambda_r);
}

Gradients backprop(const MlpModel& m, const ForwardCache& cache,
                   const Eigen::MatrixXd& targets, Penalty p, double lambda_r) {
  const int n_layers = m.num_layers();
  if (static_cast<int>(cache.layer_in.size()) != n_layers)
    throw InvalidInput("backprop: cache does not match model");
  Gradients g;
  g.w.resize(n_layers);
  g.b.resize(n_layers);

  // d(loss)/d(post-mask output)
  Eigen::MatrixXd da = (cache.outputs - targets) *
                       (2.0 / static_cast<double>(cache.outputs.size()));
  for (int i = n_layers - 1; i >= 0; --i) {
    if (cache.mask[i].size() > 0) da = da.cwiseProduct(cache.mask[i]);
    const Eigen::MatrixXd dz =
        da.cwiseProduct(activation_grad(m.activations[i], cache.z[i], cache.raw[i]));
    g.w[i] = dz.transpose() * cache.layer_in[i];
    g.b[i] = dz.colwise().sum().transpose();
    if (i > 0) da = dz * m.weights[i];
  }

  if (p == Penalty::l2) {
    for (int i = 0; i < n_layers; ++i) g.w[i] += lambda_r * m.weights[i];
  } else if (p == Penalty::l1) {
    for (int i = 0; i < n_layers; ++i) {
      g.w[i] += lambda_r * m.weights[i]
                    .unaryExpr([](double v) {
                      return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
                    })
                    .matrix();
    }
  }
  return g;
}

OptimizerState make_optimizer_state(const MlpModel& m) {
  OptimizerState s;
  for (int i = 0; i < m.num_layers(); ++i) {
    s.w_a.push_back(Eigen::MatrixXd::Zero(m.weights[i].rows(), m.weights[i].cols()));
    s.w_b.push_back(Eigen::MatrixXd::Zero(m.weights[i].rows(), m.weights[i].cols()));
    s.b_a.push_back(Eigen::VectorXd::Zero(m.biases[i].size()));
    s.b_b.push_back(Eigen::VectorXd::Zero(m.biases[i].size()));
  }
  return s;
}

namespace {

// One parameter-block update; `a` and `b` are the optimizer's running buffers.
template <typename Mat>
void step_block(Mat& param, Mat& a, Mat& b, const Mat& grad, const TrainConfig& cfg,
                long t) {
  switch (cfg.optimizer) {
    case Optimizer::sgd:
      param -= cfg.alpha * grad;
      break;
    case Optimizer::momentum:
      a = cfg.rho * a - cfg.alpha * grad;
      param += a;
      break;
    case Optimizer::adagrad:
      b.array() += grad.array().square();
      param.array() -= cfg.alpha * grad.array() / (b.array().sqrt() + cfg.eps);
      break;
    case Optimizer::rmsprop:
      b.array() = cfg.gamma_d * b.array() + (1.0 - cfg.gamma_d) * grad.array().square();
      param.array() -= cfg.alpha * grad.array() / (b.array().sqrt() + cfg.eps);
      break;
    case Optimizer::adam: {
      a.array() = cfg.rho * a.array() + (1.0 - cfg.rho) * grad.array();
      b.array() = cfg.gamma_d * b.array() + (1.0 - cfg.gamma_d) * grad.array().square();
      const double corr_a = 1.0 - std::pow(cfg.rho, static_cast<double>(t));
      const double corr_b = 1.0 - std::pow(cfg.gamma_d, static_cast<double>(t));
      param.array() -= cfg.alpha * (a.array() / corr_a) /
                       ((b.array() / corr_b).sqrt() + cfg.eps);
      break;
    }
  }
}

}  // namespace

void optimizer_step(MlpModel& m, OptimizerState& state, const Gradients& g,
                    const TrainConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(g.w.size()) != m.num_layers())
    throw InvalidInput("optimizer_step: gradient count mismatch");
  ++state.step_count;
  for (int i = 0; i < m.num_layers(); ++i) {
    step_block(m.weights[i], state.w_a[i], state.w_b[i], g.w[i], cfg,
               state.step_count);
    step_block(m.biases[i], state.b_a[i], state.b_b[i], g.b[i], cfg,
               state.step_count);
  }
}

Eigen::MatrixXd features_matrix(const FingerprintDb& db) {
  db.validate();
  if (db.rows.empty()) throw InvalidInput("features_matrix: empty database");
  Eigen::MatrixXd x(db.rows.size(), db.dim());
  for (std::size_t i = 0; i < db.rows.size(); ++i)
    for (int j = 0; j < db.dim(); ++j) x(i, j) = db.rows[i].features[j];
  return x;
}

Eigen::MatrixXd locations_matrix(const FingerprintDb& db) {
  Eigen::MatrixXd y(db.rows.size(), 2);
  for (std::size_t i = 0; i < db.rows.size(); ++i) {
    y(i, 0) = db.rows[i].location.x;
    y(i, 1) = db.rows[i].location.y;
  }
  return y;
}

namespace {

double validation_metric(const MlpModel& m, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& y, ValMetric metric) {
  const Eigen::MatrixXd pred = forward_eval(m, x);
  if (metric == ValMetric::mse) return mse(pred, y);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i)
    acc += std::hypot(pred(i, 0) - y(i, 0), pred(i, 1) - y(i, 1));
  return acc / static_cast<double>(pred.rows());
}

}  // namespace

TrainHistory train_on_matrices(MlpModel& m, const Eigen::MatrixXd& x_train,
                               const Eigen::MatrixXd& y_train,
                               const Eigen::MatrixXd& x_val,
                               const Eigen::MatrixXd& y_val, const TrainConfig& cfg,
                               ValMetric metric) {
  m.validate();
  cfg.validate();
  if (x_train.rows() == 0) throw InvalidInput("train: empty training set");
  if (x_val.rows() == 0) throw InvalidInput("train: empty validation set");
  if (x_train.rows() != y_train.rows() || x_val.rows() != y_val.rows())
    throw InvalidInput("train: feature/target row mismatch");
  if (metric == ValMetric::location_error_m && y_val.cols() != 2)
    throw InvalidInput("train: location metric needs 2-column targets");

  Rng rng(cfg.seed);
  OptimizerState state = make_optimizer_state(m);
  TrainHistory history;
  history.stop_reason = "max_epochs";

  const Eigen::Index n = x_train.rows();
  const Eigen::Index batch = std::min<Eigen::Index>(cfg.batch_size, n);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<Eigen::MatrixXd> best_w = m.weights;
  std::vector<Eigen::VectorXd> best_b = m.biases;
  double best_val = std::numeric_limits<double>::infinity();
  int epochs_since_best = 0;

  Eigen::MatrixXd xb, yb;
  ForwardCache cache;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    long loss_count = 0;
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index len = std::min(batch, n - start);
      xb.resize(len, x_train.cols());
      yb.resize(len, y_train.cols());
      for (Eigen::Index r = 0; r < len; ++r) {
        xb.row(r) = x_train.row(order[static_cast<std::size_t>(start + r)]);
        yb.row(r) = y_train.row(order[static_cast<std::size_t>(start + r)]);
      }
      forward_train(m, xb, rng, cache);
      loss_sum += mse(cache.outputs, yb) * static_cast<double>(len);
      loss_count += len;
      const Gradients g = backprop(m, cache, yb, cfg.penalty, cfg.lambda_r);
      optimizer_step(m, state, g, cfg);
    }
    history.train_loss.push_back(loss_sum / static_cast<double>(loss_count) +
                                 penalty_value(m, cfg.penalty, cfg.lambda_r));

    const double val = validation_metric(m, x_val, y_val, metric);
    history.val_error_m.push_back(val);
    if (val < best_val) {
      best_val = val;
      history.best_epoch = epoch;
      best_w = m.weights;
      best_b = m.biases;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= cfg.patience) {
        history.stop_reason = "patience";
        break;
      }
    }
  }

  if (history.best_epoch >= 0) {
    m.weights = std::move(best_w);
    m.biases = std::move(best_b);
  }
  return history;
}

TrainHistory train(MlpModel& m, const FingerprintDb& train_db,
                   const FingerprintDb& val_db, const TrainConfig& cfg) {
  return train_on_matrices(m, features_matrix(train_db), locations_matrix(train_db),
                           features_matrix(val_db), locations_matrix(val_db), cfg,
                           ValMetric::location_error_m);
}

TrainHistory fine_tune(MlpModel& m, const FingerprintDb& train_db,
                       const FingerprintDb& val_db, const TrainConfig& cfg) {
  // Same contract as train; the caller supplies pretrained weights.
  return train(m, train_db, val_db, cfg);
}

std::vector<Point2> predict(const MlpModel& m, const FingerprintDb& db) {
  const Eigen::MatrixXd out = forward_eval(m, features_matrix(db));
  if (out.cols() != 2) throw InvalidInput("predict: model output is not 2-D");
  std::vector<Point2> locations(static_cast<std::size_t>(out.rows()));
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    locations[static_cast<std::size_t>(i)] = {out(i, 0), out(i, 1)};
  return locations;
}

Eigen::MatrixXd encode(const MlpModel& m, const Eigen::MatrixXd& batch) {
  if (m.num_layers() < 2) throw InvalidInput("encode: model has no code layer");
  if (batch.cols() != m.input_dim()) throw InvalidInput("encode: width mismatch");
  return apply_activation(m.activations[0], layer_z(m, 0, batch));
}

FingerprintDb encode_db(const MlpModel& m, const FingerprintDb& db) {
  const Eigen::MatrixXd codes = encode(m, features_matrix(db));
  FingerprintDb out;
  out.width = 1;
  for (Eigen::Index j = 0; j < codes.cols(); ++j)
    out.ap_ids.push_back("z" + std::to_string(j + 1));
  out.rows.resize(db.rows.size());
  for (std::size_t i = 0; i < db.rows.size(); ++i) {
    out.rows[i].location = db.rows[i].location;
    out.rows[i].class_label = db.rows[i].class_label;
    out.rows[i].features.resize(static_cast<std::size_t>(codes.cols()));
    for (Eigen::Index j = 0; j < codes.cols(); ++j)
      out.rows[i].features[static_cast<std::size_t>(j)] =
          codes(static_cast<Eigen::Index>(i), j);
  }
  return out;
}

}  // namespace fploc
