#include "fploc/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "fploc/error.hpp"

namespace fploc {

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(gamma_k > 0.0))
    throw InvalidInput("rbf kernel needs gamma > 0");
  if (kind == KernelKind::polynomial && degree < 1)
    throw InvalidInput("polynomial kernel needs degree >= 1");
}

namespace {

double kernel_eval_impl(const KernelSpec& spec, const double* x, const double* y,
                        std::size_t n) {
  switch (spec.kind) {
    case KernelKind::linear: {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += x[j] * y[j];
      return dot;
    }
    case KernelKind::rbf: {
      double sq = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = x[j] - y[j];
        sq += d * d;
      }
      return std::exp(-spec.gamma_k * sq);
    }
    case KernelKind::polynomial: {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += x[j] * y[j];
      return std::pow(dot + spec.coef, spec.degree);
    }
  }
  throw Error("unreachable kernel kind");
}

struct SmoCore {
  std::vector<double> lambda;
  double bias = 0.0;
  long iterations = 0;
};

// Two-variable subproblem step on (i1, i2). Returns false when no move is possible.
bool pair_step(const Eigen::MatrixXd& K, const std::vector<double>& y, double c,
               std::vector<double>& lambda, std::vector<double>& f, int i1, int i2) {
  if (i1 == i2) return false;
  const double y1 = y[i1], y2 = y[i2];
  const double l1 = lambda[i1], l2 = lambda[i2];
  const double s = y1 * y2;

  double lo, hi;
  if (s < 0.0) {
    lo = std::max(0.0, l2 - l1);
    hi = std::min(c, c + l2 - l1);
  } else {
    lo = std::max(0.0, l1 + l2 - c);
    hi = std::min(c, l1 + l2);
  }
  if (hi - lo < 1e-14) return false;

  const double k11 = K(i1, i1), k22 = K(i2, i2), k12 = K(i1, i2);
  const double eta = k11 + k22 - 2.0 * k12;
  const double e1 = f[i1] - y1;
  const double e2 = f[i2] - y2;

  double l2_new;
  if (eta > 1e-14) {
    l2_new = std::clamp(l2 + y2 * (e1 - e2) / eta, lo, hi);
  } else {
    // Flat or concave along the pair direction: jump to the better endpoint.
    const auto obj_delta = [&](double t) {
      const double d2 = t - l2;
      const double d1 = -s * d2;
      return d1 * y1 * f[i1] + d2 * y2 * f[i2] +
             0.5 * (d1 * d1 * k11 + d2 * d2 * k22) + d1 * d2 * s * k12 - d1 - d2;
    };
    l2_new = obj_delta(lo) <= obj_delta(hi) ? lo : hi;
  }
  // Snap bound residue on both variables; a multiplier stranded 1e-15 inside the
  // box would otherwise pollute the working sets and the free-vector bias mean.
  if (std::abs(l2_new) < 1e-10) l2_new = 0.0;
  if (std::abs(l2_new - c) < 1e-10) l2_new = c;

  const double d2 = l2_new - l2;
  if (std::abs(d2) < 1e-14) return false;
  const double d1 = -s * d2;
  double l1_new = l1 + d1;
  if (std::abs(l1_new) < 1e-10) l1_new = 0.0;
  if (std::abs(l1_new - c) < 1e-10) l1_new = c;

  lambda[i1] = l1_new;
  lambda[i2] = l2_new;
  const double step1 = (l1_new - l1) * y1;
  const double step2 = d2 * y2;
  for (std::size_t k = 0; k < f.size(); ++k)
    f[k] += step1 * K(i1, k) + step2 * K(i2, k);
  return true;
}

// Keerthi-style most-violating-pair SMO over a precomputed Gram matrix.
SmoCore smo_core(const Eigen::MatrixXd& K, const std::vector<double>& y, double c,
                 double tol, long max_iter) {
  const int n = static_cast<int>(y.size());
  SmoCore out;
  out.lambda.assign(n, 0.0);
  std::vector<double> f(n, 0.0);  // decision values without bias

  const auto in_up = [&](int k) {
    return (y[k] > 0.0 && out.lambda[k] < c) || (y[k] < 0.0 && out.lambda[k] > 0.0);
  };
  const auto in_low = [&](int k) {
    return (y[k] < 0.0 && out.lambda[k] < c) || (y[k] > 0.0 && out.lambda[k] > 0.0);
  };

  long iter = 0;
  while (true) {
    double m = -std::numeric_limits<double>::infinity();
    double big_m = std::numeric_limits<double>::infinity();
    int i_up = -1, i_low = -1;
    for (int k = 0; k < n; ++k) {
      const double v = y[k] - f[k];
      if (in_up(k) && v > m) {
        m = v;
        i_up = k;
      }
      if (in_low(k) && v < big_m) {
        big_m = v;
        i_low = k;
      }
    }
    if (i_up < 0 || i_low < 0 || m - big_m < tol) break;
    if (iter >= max_iter)
      throw ConvergenceError("smo: no convergence after " + std::to_string(iter) +
                             " iterations (kkt gap " + std::to_string(m - big_m) +
                             ", n=" + std::to_string(n) + ", C=" + std::to_string(c) +
                             ")");
    ++iter;
    if (!pair_step(K, y, c, out.lambda, f, i_up, i_low)) {
      // The most-violating pair is blocked (degenerate geometry); take any
      // improving pair, or accept pairwise optimality.
      bool moved = false;
      for (int i = 0; i < n && !moved; ++i) {
        if (!in_up(i)) continue;
        for (int j = 0; j < n && !moved; ++j) {
          if (!in_low(j)) continue;
          moved = pair_step(K, y, c, out.lambda, f, i, j);
        }
      }
      if (!moved) break;
    }
  }
  out.iterations = iter;

  // Bias from free support vectors, else midpoint of the feasible interval.
  double sum = 0.0;
  int free_count = 0;
  for (int k = 0; k < n; ++k) {
    if (out.lambda[k] > 0.0 && out.lambda[k] < c) {
      sum += y[k] - f[k];
      ++free_count;
    }
  }
  if (free_count > 0) {
    out.bias = sum / free_count;
  } else {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      const double v = y[k] - f[k];
      const bool at_zero = out.lambda[k] == 0.0;
      if ((at_zero && y[k] > 0.0) || (!at_zero && y[k] < 0.0)) {
        lo = std::max(lo, v);
      } else {
        hi = std::min(hi, v);
      }
    }
    if (std::isinf(lo) && std::isinf(hi))
      out.bias = 0.0;
    else if (std::isinf(lo))
      out.bias = hi;
    else if (std::isinf(hi))
      out.bias = lo;
    else
      out.bias = 0.5 * (lo + hi);
  }
  return out;
}

long default_max_iter(std::size_t n) {
  return std::max<long>(100000, 1000 * static_cast<long>(n));
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const std::vector<double>& x,
                   const std::vector<double>& y) {
  spec.validate();
  if (x.size() != y.size())
    throw InvalidInput("kernel_eval: lengths " + std::to_string(x.size()) + " vs " +
                       std::to_string(y.size()));
  return kernel_eval_impl(spec, x.data(), y.data(), x.size());
}

BinarySvm smo_solve(const std::vector<std::vector<double>>& points,
                    const std::vector<int>& labels, double c_penalty,
                    const KernelSpec& spec, const SmoOptions& opts) {
  spec.validate();
  if (points.size() != labels.size())
    throw InvalidInput("smo_solve: points/labels size mismatch");
  if (points.empty()) throw InvalidInput("smo_solve: no training points");
  if (!(c_penalty > 0.0)) throw InvalidInput("smo_solve: C must be > 0");
  if (!(opts.tol > 0.0)) throw InvalidInput("smo_solve: tol must be > 0");

  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (points[i].size() != dim) throw InvalidInput("smo_solve: ragged point widths");
    if (labels[i] == 1)
      has_pos = true;
    else if (labels[i] == -1)
      has_neg = true;
    else
      throw InvalidInput("smo_solve: labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw InvalidInput("smo_solve: need both labels");

  Eigen::MatrixXd gram(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel_eval_impl(spec, points[i].data(), points[j].data(), dim);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(labels[i]);

  const long cap = opts.max_iter > 0 ? opts.max_iter : default_max_iter(n);
  const SmoCore core = smo_core(gram, y, c_penalty, opts.tol, cap);

  BinarySvm model;
  model.kernel = spec;
  model.c_penalty = c_penalty;
  model.bias = core.bias;
  for (std::size_t i = 0; i < n; ++i) {
    if (core.lambda[i] > 0.0) {
      model.support_points.push_back(points[i]);
      model.coef.push_back(core.lambda[i] * y[i]);
    }
  }
  return model;
}

double svm_decision(const BinarySvm& model, const std::vector<double>& x) {
  double score = model.bias;
  for (std::size_t i = 0; i < model.support_points.size(); ++i) {
    if (model.support_points[i].size() != x.size())
      throw InvalidInput("svm_decision: width mismatch");
    score += model.coef[i] *
             kernel_eval_impl(model.kernel, model.support_points[i].data(), x.data(),
                              x.size());
  }
  return score;
}

OvoModel ovo_train(const FingerprintDb& db, double c_penalty, const KernelSpec& spec,
                   const SmoOptions& opts) {
  spec.validate();
  db.validate();
  if (!(c_penalty > 0.0)) throw InvalidInput("ovo_train: C must be > 0");

  // Class inventory with representative locations (mean of member locations).
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < db.rows.size(); ++i) {
    if (db.rows[i].class_label < 0)
      throw InvalidInput("ovo_train: row without class label");
    members[db.rows[i].class_label].push_back(i);
  }
  if (members.size() < 2) throw InvalidInput("ovo_train: need at least 2 classes");

  OvoModel model;
  model.kernel = spec;
  model.c_penalty = c_penalty;
  const std::size_t n = db.rows.size();
  const int dim = db.dim();
  model.points.resize(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) model.points(i, j) = db.rows[i].features[j];

  for (const auto& [cls, rows] : members) {
    model.class_ids.push_back(cls);
    Point2 mean{0.0, 0.0};
    for (std::size_t r : rows) {
      mean.x += db.rows[r].location.x;
      mean.y += db.rows[r].location.y;
    }
    mean.x /= static_cast<double>(rows.size());
    mean.y /= static_cast<double>(rows.size());
    model.class_locations.push_back(mean);
  }

  const long cap = opts.max_iter > 0 ? opts.max_iter : default_max_iter(64);
  const double tol = opts.tol;

  const std::size_t n_classes = model.class_ids.size();
  model.pairs.reserve(n_classes * (n_classes - 1) / 2);
  for (std::size_t a = 0; a < n_classes; ++a) {
    for (std::size_t b = a + 1; b < n_classes; ++b) {
      const std::vector<std::size_t>& rows_a = members[model.class_ids[a]];
      const std::vector<std::size_t>& rows_b = members[model.class_ids[b]];
      std::vector<std::size_t> rows;
      rows.insert(rows.end(), rows_a.begin(), rows_a.end());
      rows.insert(rows.end(), rows_b.begin(), rows_b.end());
      const std::size_t m = rows.size();

      Eigen::MatrixXd gram(m, m);
      std::vector<double> y(m);
      for (std::size_t i = 0; i < m; ++i) {
        y[i] = i < rows_a.size() ? 1.0 : -1.0;
        for (std::size_t j = i; j < m; ++j) {
          const double v =
              kernel_eval_impl(spec, db.rows[rows[i]].features.data(),
                               db.rows[rows[j]].features.data(), dim);
          gram(i, j) = v;
          gram(j, i) = v;
        }
      }
      const SmoCore core = smo_core(gram, y, c_penalty, tol, cap);

      PairwiseSvm pair;
      pair.class_a = model.class_ids[a];
      pair.class_b = model.class_ids[b];
      pair.bias = core.bias;
      for (std::size_t i = 0; i < m; ++i) {
        if (core.lambda[i] > 0.0) {
          pair.sv_index.push_back(static_cast<int>(rows[i]));
          pair.coef.push_back(core.lambda[i] * y[i]);
        }
      }
      model.pairs.push_back(std::move(pair));
    }
  }
  return model;
}

namespace {

// One kernel evaluation per stored training point, shared across all pairs.
Eigen::VectorXd kernel_column(const OvoModel& model, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != model.points.cols())
    throw InvalidInput("ovo query: width mismatch");
  const Eigen::Map<const Eigen::VectorXd> q(x.data(), x.size());
  switch (model.kernel.kind) {
    case KernelKind::linear:
      return model.points * q;
    case KernelKind::rbf: {
      Eigen::VectorXd sq =
          (model.points.rowwise() - q.transpose()).rowwise().squaredNorm();
      return (-model.kernel.gamma_k * sq.array()).exp();
    }
    case KernelKind::polynomial: {
      Eigen::VectorXd dot = model.points * q;
      return (dot.array() + model.kernel.coef).pow(model.kernel.degree);
    }
  }
  throw Error("unreachable kernel kind");
}

std::vector<int> votes_from_column(const OvoModel& model, const Eigen::VectorXd& kcol) {
  const auto pos_of = [&](int cls) {
    const auto it =
        std::lower_bound(model.class_ids.begin(), model.class_ids.end(), cls);
    if (it == model.class_ids.end() || *it != cls)
      throw InvalidInput("ovo model references unknown class");
    return static_cast<std::size_t>(it - model.class_ids.begin());
  };
  std::vector<int> votes(model.class_ids.size(), 0);
  for (const PairwiseSvm& pair : model.pairs) {
    double score = pair.bias;
    for (std::size_t i = 0; i < pair.sv_index.size(); ++i)
      score += pair.coef[i] * kcol(pair.sv_index[i]);
    ++votes[pos_of(score >= 0.0 ? pair.class_a : pair.class_b)];
  }
  return votes;
}

}  // namespace

std::vector<int> ovo_votes(const OvoModel& model, const std::vector<double>& x) {
  return votes_from_column(model, kernel_column(model, x));
}

int ovo_classify(const OvoModel& model, const std::vector<double>& x) {
  const std::vector<int> votes = ovo_votes(model, x);
  std::size_t best = 0;
  for (std::size_t i = 1; i < votes.size(); ++i)
    if (votes[i] > votes[best]) best = i;  // ties keep the smaller class id
  return model.class_ids[best];
}

Point2 svm_localize(const OvoModel& model, const std::vector<double>& x, int k_top) {
  if (k_top < 1) throw InvalidInput("svm_localize: k_top must be >= 1");
  if (static_cast<std::size_t>(k_top) > model.class_ids.size())
    throw InvalidInput("svm_localize: k_top exceeds class count");
  const std::vector<int> votes = ovo_votes(model, x);

  std::vector<std::size_t> order(votes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (votes[a] != votes[b]) return votes[a] > votes[b];
    return model.class_ids[a] < model.class_ids[b];
  });

  Point2 acc{0.0, 0.0};
  for (int i = 0; i < k_top; ++i) {
    acc.x += model.class_locations[order[i]].x;
    acc.y += model.class_locations[order[i]].y;
  }
  return {acc.x / k_top, acc.y / k_top};
}

}  // namespace fploc
