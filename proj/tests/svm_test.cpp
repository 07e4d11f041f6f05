#include "fploc/svm.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fploc/error.hpp"
#include "fploc/knn.hpp"
#include "fploc/rng.hpp"

namespace fploc {
namespace {

TEST(KernelEval, HandValues) {
  KernelSpec lin;
  lin.kind = KernelKind::linear;
  EXPECT_DOUBLE_EQ(kernel_eval(lin, {1.0, 2.0}, {3.0, 4.0}), 11.0);

  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.gamma_k = 0.5;
  EXPECT_DOUBLE_EQ(kernel_eval(rbf, {0.0, 0.0}, {1.0, 1.0}), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(kernel_eval(rbf, {2.0, 3.0}, {2.0, 3.0}), 1.0);

  KernelSpec poly;
  poly.kind = KernelKind::polynomial;
  poly.degree = 2;
  poly.coef = 1.0;
  EXPECT_DOUBLE_EQ(kernel_eval(poly, {1.0, 2.0}, {3.0, 4.0}), 144.0);
}

TEST(KernelEval, SymmetricAndValidating) {
  Rng rng(51);
  KernelSpec specs[3];
  specs[0].kind = KernelKind::linear;
  specs[1].kind = KernelKind::rbf;
  specs[1].gamma_k = 0.7;
  specs[2].kind = KernelKind::polynomial;
  specs[2].degree = 3;
  specs[2].coef = 0.5;
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
    const std::vector<double> y = {rng.normal(), rng.normal(), rng.normal()};
    for (const KernelSpec& s : specs)
      EXPECT_DOUBLE_EQ(kernel_eval(s, x, y), kernel_eval(s, y, x));
  }
  KernelSpec bad;
  bad.kind = KernelKind::rbf;
  bad.gamma_k = 0.0;
  EXPECT_THROW(kernel_eval(bad, {1.0}, {1.0}), InvalidInput);
  bad.kind = KernelKind::polynomial;
  bad.degree = 0;
  EXPECT_THROW(kernel_eval(bad, {1.0}, {1.0}), InvalidInput);
  EXPECT_THROW(kernel_eval(specs[0], {1.0}, {1.0, 2.0}), InvalidInput);
}

TEST(SmoSolve, TwoPointAnalyticSolution) {
  // 1-d points 1 (+1) and 3 (-1), linear kernel, C large enough to stay free:
  // lambda = (0.5, 0.5), f(x) = -x + 2.
  KernelSpec lin;
  lin.kind = KernelKind::linear;
  const BinarySvm model = smo_solve({{1.0}, {3.0}}, {1, -1}, 10.0, lin);
  ASSERT_EQ(model.support_points.size(), 2u);
  EXPECT_NEAR(model.coef[0], 0.5, 1e-9);
  EXPECT_NEAR(model.coef[1], -0.5, 1e-9);
  EXPECT_NEAR(model.bias, 2.0, 1e-9);
  EXPECT_NEAR(svm_decision(model, {1.0}), 1.0, 1e-9);
  EXPECT_NEAR(svm_decision(model, {3.0}), -1.0, 1e-9);
  EXPECT_NEAR(svm_decision(model, {2.0}), 0.0, 1e-9);
  EXPECT_NEAR(svm_decision(model, {0.0}), 2.0, 1e-9);
}

TEST(SmoSolve, CoincidentOppositePointsSaturateTheBox) {
  // Identical observations with opposite labels: lambdas climb to C and the
  // decision collapses to the (zero) bias.
  KernelSpec lin;
  lin.kind = KernelKind::linear;
  const BinarySvm model = smo_solve({{1.0}, {1.0}}, {1, -1}, 5.0, lin);
  ASSERT_EQ(model.support_points.size(), 2u);
  EXPECT_NEAR(std::abs(model.coef[0]), 5.0, 1e-9);
  EXPECT_NEAR(std::abs(model.coef[1]), 5.0, 1e-9);
  EXPECT_NEAR(model.bias, 0.0, 1e-9);
  EXPECT_NEAR(svm_decision(model, {7.0}), 0.0, 1e-9);
}

// Dual objective recomputed from the stored support expansion.
double dual_value(const BinarySvm& model) {
  double sum_lambda = 0.0;
  for (double c : model.coef) sum_lambda += std::abs(c);
  double quad = 0.0;
  for (std::size_t i = 0; i < model.support_points.size(); ++i) {
    for (std::size_t j = 0; j < model.support_points.size(); ++j) {
      quad += model.coef[i] * model.coef[j] *
              kernel_eval(model.kernel, model.support_points[i],
                          model.support_points[j]);
    }
  }
  return sum_lambda - 0.5 * quad;
}

TEST(SmoSolve, BeatsACoarseGridSearchOnTheDual) {
  // 4 points in 1-d; grid-search the dual over (l0, l1, l2) with l3 pinned by
  // the equality constraint.
  const std::vector<std::vector<double>> pts = {{0.0}, {1.0}, {2.5}, {3.0}};
  const std::vector<int> labels = {1, 1, -1, -1};
  const double c = 2.0;
  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.gamma_k = 0.5;

  const BinarySvm model = smo_solve(pts, labels, c, rbf);

  Eigen::MatrixXd gram(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gram(i, j) = kernel_eval(rbf, pts[i], pts[j]);

  double best = -1e300;
  const int steps = 40;
  const double step = c / steps;
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; b <= steps; ++b) {
      for (int d = 0; d <= steps; ++d) {
        double l[4] = {a * step, b * step, d * step, 0.0};
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) acc += l[i] * labels[i];
        l[3] = acc * labels[3];  // 1/y == y for labels in {-1,+1}
        if (l[3] < -1e-9 || l[3] > c + 1e-9) continue;
        double obj = l[0] + l[1] + l[2] + l[3];
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            obj -= 0.5 * l[i] * l[j] * labels[i] * labels[j] * gram(i, j);
        best = std::max(best, obj);
      }
    }
  }
  EXPECT_GE(dual_value(model), best - 1e-3);
}

TEST(SmoSolve, KktConditionsHoldAtToleranceAcrossKernels) {
  Rng rng(52);
  std::vector<KernelSpec> kernels(3);
  kernels[0].kind = KernelKind::linear;
  kernels[1].kind = KernelKind::rbf;
  kernels[1].gamma_k = 0.5;
  kernels[2].kind = KernelKind::polynomial;
  kernels[2].degree = 2;
  kernels[2].coef = 1.0;

  const SmoOptions opts;
  for (double c : {0.1, 1.0, 10.0}) {
    for (const KernelSpec& spec : kernels) {
      std::vector<std::vector<double>> pts;
      std::vector<int> labels;
      for (int i = 0; i < 12; ++i) {
        pts.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        labels.push_back(i == 0 ? 1 : (i == 1 ? -1 : (rng.below(2) ? 1 : -1)));
      }
      const BinarySvm model = smo_solve(pts, labels, c, spec, opts);

      double coef_sum = 0.0;
      for (double co : model.coef) {
        coef_sum += co;
        EXPECT_LE(std::abs(co), c + 1e-9);
        EXPECT_GT(std::abs(co), 0.0);
      }
      EXPECT_NEAR(coef_sum, 0.0, 1e-6);

      // Map each training point to its multiplier (0 when not stored).
      const double slack = opts.tol + 1e-6;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        double lambda = 0.0;
        for (std::size_t s = 0; s < model.support_points.size(); ++s) {
          if (model.support_points[s] == pts[i] &&
              (model.coef[s] > 0) == (labels[i] > 0)) {
            lambda = std::abs(model.coef[s]);
          }
        }
        const double margin = labels[i] * svm_decision(model, pts[i]);
        if (lambda < c * (1.0 - 1e-6)) EXPECT_GE(margin, 1.0 - slack);
        if (lambda > c * 1e-6) EXPECT_LE(margin, 1.0 + slack);
      }
    }
  }
}

TEST(SmoSolve, IterationCapRaisesConvergenceError) {
  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.gamma_k = 1.0;
  const std::vector<std::vector<double>> pts = {
      {0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}};
  const std::vector<int> labels = {1, 1, -1, -1};
  SmoOptions opts;
  opts.max_iter = 1;
  EXPECT_THROW(smo_solve(pts, labels, 10.0, rbf, opts), ConvergenceError);
  opts.max_iter = 0;  // auto cap converges fine
  EXPECT_NO_THROW(smo_solve(pts, labels, 10.0, rbf, opts));
}

TEST(SmoSolve, RejectsMalformedProblems) {
  KernelSpec lin;
  lin.kind = KernelKind::linear;
  EXPECT_THROW(smo_solve({}, {}, 1.0, lin), InvalidInput);
  EXPECT_THROW(smo_solve({{1.0}}, {1, -1}, 1.0, lin), InvalidInput);
  EXPECT_THROW(smo_solve({{1.0}, {2.0}}, {1, 0}, 1.0, lin), InvalidInput);
  EXPECT_THROW(smo_solve({{1.0}, {2.0}}, {1, 1}, 1.0, lin), InvalidInput);
  EXPECT_THROW(smo_solve({{1.0}, {2.0}}, {1, -1}, 0.0, lin), InvalidInput);
  EXPECT_THROW(smo_solve({{1.0}, {2.0, 3.0}}, {1, -1}, 1.0, lin), InvalidInput);
  SmoOptions opts;
  opts.tol = 0.0;
  EXPECT_THROW(smo_solve({{1.0}, {2.0}}, {1, -1}, 1.0, lin, opts), InvalidInput);
}

FingerprintDb three_cluster_db() {
  FingerprintDb db;
  db.ap_ids = {"a"};
  db.width = 1;
  db.rows = {
      FingerprintRow{{0.0, 0.0}, {0.0}, 0},  FingerprintRow{{0.0, 2.0}, {1.0}, 0},
      FingerprintRow{{10.0, 0.0}, {10.0}, 1}, FingerprintRow{{10.0, 2.0}, {11.0}, 1},
      FingerprintRow{{20.0, 0.0}, {20.0}, 2}, FingerprintRow{{20.0, 2.0}, {21.0}, 2},
  };
  return db;
}

TEST(Ovo, ThreeWellSeparatedClasses) {
  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.gamma_k = 0.25;
  const OvoModel model = ovo_train(three_cluster_db(), 10.0, rbf);
  ASSERT_EQ(model.class_ids, (std::vector<int>{0, 1, 2}));
  ASSERT_EQ(model.pairs.size(), 3u);
  EXPECT_DOUBLE_EQ(model.class_locations[0].x, 0.0);
  EXPECT_DOUBLE_EQ(model.class_locations[0].y, 1.0);
  EXPECT_DOUBLE_EQ(model.class_locations[2].x, 20.0);

  EXPECT_EQ(ovo_classify(model, {0.5}), 0);
  EXPECT_EQ(ovo_classify(model, {10.4}), 1);
  EXPECT_EQ(ovo_classify(model, {20.7}), 2);

  const std::vector<int> votes = ovo_votes(model, {0.5});
  ASSERT_EQ(votes.size(), 3u);
  EXPECT_EQ(votes[0] + votes[1] + votes[2], 3);
  EXPECT_EQ(votes[0], 2);

  const Point2 top1 = svm_localize(model, {10.4}, 1);
  EXPECT_DOUBLE_EQ(top1.x, 10.0);
  EXPECT_DOUBLE_EQ(top1.y, 1.0);
  const Point2 top3 = svm_localize(model, {10.4}, 3);
  EXPECT_DOUBLE_EQ(top3.x, 10.0);
}

TEST(Ovo, VoteTiesResolveToSmallestClassId) {
  // Hand-built cycle: 0 beats 1, 2 beats 0, 1 beats 2 -> one vote each.
  OvoModel model;
  model.kernel.kind = KernelKind::linear;
  model.class_ids = {0, 1, 2};
  model.class_locations = {{0.0, 0.0}, {4.0, 0.0}, {8.0, 6.0}};
  model.points = Eigen::MatrixXd::Zero(1, 1);
  PairwiseSvm p01;
  p01.class_a = 0;
  p01.class_b = 1;
  p01.bias = 1.0;
  PairwiseSvm p02;
  p02.class_a = 0;
  p02.class_b = 2;
  p02.bias = -1.0;
  PairwiseSvm p12;
  p12.class_a = 1;
  p12.class_b = 2;
  p12.bias = 1.0;
  model.pairs = {p01, p02, p12};

  EXPECT_EQ(ovo_votes(model, {0.0}), (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(ovo_classify(model, {0.0}), 0);
  // Tied ordering is by class id: top-2 averages classes 0 and 1.
  const Point2 top2 = svm_localize(model, {0.0}, 2);
  EXPECT_DOUBLE_EQ(top2.x, 2.0);
  EXPECT_DOUBLE_EQ(top2.y, 0.0);
  // A zero score counts for the +1 side.
  model.pairs[1].bias = 0.0;
  EXPECT_EQ(ovo_votes(model, {0.0}), (std::vector<int>{2, 1, 0}));
}

TEST(Ovo, LocalizeValidatesKTop) {
  KernelSpec rbf;
  const OvoModel model = ovo_train(three_cluster_db(), 1.0, rbf);
  EXPECT_THROW(svm_localize(model, {0.0}, 0), InvalidInput);
  EXPECT_THROW(svm_localize(model, {0.0}, 4), InvalidInput);
  EXPECT_THROW(ovo_votes(model, {0.0, 1.0}), InvalidInput);
}

TEST(Ovo, TrainValidatesInput) {
  KernelSpec rbf;
  FingerprintDb db = three_cluster_db();
  db.rows[3].class_label = -1;
  EXPECT_THROW(ovo_train(db, 1.0, rbf), InvalidInput);
  db = three_cluster_db();
  for (auto& row : db.rows) row.class_label = 0;
  EXPECT_THROW(ovo_train(db, 1.0, rbf), InvalidInput);
  EXPECT_THROW(ovo_train(three_cluster_db(), -1.0, rbf), InvalidInput);
}

TEST(Ovo, SinglePointClassesReduceToNearestNeighbor) {
  // One observation per class and C beyond 1/(1 - K_max): every pairwise
  // model picks the nearer point, so the vote winner is the 1-NN class.
  Rng rng(53);
  FingerprintDb db;
  db.ap_ids = {"a", "b"};
  db.width = 1;
  for (int i = 0; i < 6; ++i) {
    db.rows.push_back(FingerprintRow{
        {rng.uniform(0.0, 20.0), rng.uniform(0.0, 10.0)},
        {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
        i});
  }
  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.gamma_k = 0.5;
  double k_max = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      k_max = std::max(k_max, kernel_eval(rbf, db.rows[i].features, db.rows[j].features));
  const double c = 1.5 / (1.0 - k_max);
  const OvoModel model = ovo_train(db, c, rbf);

  KnnConfig nn;
  nn.k = 1;
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> q = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    EXPECT_EQ(ovo_classify(model, q), knn_classify(db, q, nn));
  }
}

TEST(Ovo, TrainingIsDeterministic) {
  KernelSpec rbf;
  rbf.gamma_k = 0.25;
  const OvoModel m1 = ovo_train(three_cluster_db(), 2.0, rbf);
  const OvoModel m2 = ovo_train(three_cluster_db(), 2.0, rbf);
  ASSERT_EQ(m1.pairs.size(), m2.pairs.size());
  for (std::size_t i = 0; i < m1.pairs.size(); ++i) {
    EXPECT_EQ(m1.pairs[i].bias, m2.pairs[i].bias);
    EXPECT_EQ(m1.pairs[i].coef, m2.pairs[i].coef);
    EXPECT_EQ(m1.pairs[i].sv_index, m2.pairs[i].sv_index);
  }
}

}  // namespace
}  // namespace fploc
