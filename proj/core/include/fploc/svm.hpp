#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fploc/fingerprint.hpp"
#include "fploc/geometry.hpp"

namespace fploc {

enum class KernelKind { linear, rbf, polynomial };

struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  double gamma_k = 0.25;  // rbf
  int degree = 2;         // polynomial
  double coef = 0.0;      // polynomial additive term
  void validate() const;
};

double kernel_eval(const KernelSpec& spec, const std::vector<double>& x,
                   const std::vector<double>& y);

struct BinarySvm {
  KernelSpec kernel;
  double c_penalty = 1.0;
  std::vector<std::vector<double>> support_points;
  std::vector<double> coef;  // lambda_i * y_i per support point
  double bias = 0.0;
};

struct SmoOptions {
  double tol = 1e-3;
  long max_iter = 0;  // 0 picks a bound from the problem size
};

// Dual soft-margin solve; labels in {-1,+1}, both present.
BinarySvm smo_solve(const std::vector<std::vector<double>>& points,
                    const std::vector<int>& labels, double c_penalty,
                    const KernelSpec& spec, const SmoOptions& opts = {});

// Score of x; class +1 iff score >= 0.
double svm_decision(const BinarySvm& model, const std::vector<double>& x);

// One binary model per unordered class pair; support vectors index into the
// shared point matrix so a query evaluates each kernel value once.
struct PairwiseSvm {
  int class_a = 0;  // +1 side
  int class_b = 0;  // -1 side
  std::vector<int> sv_index;
  std::vector<double> coef;
  double bias = 0.0;
};

struct OvoModel {
  KernelSpec kernel;
  double c_penalty = 1.0;
  std::vector<int> class_ids;            // ascending
  std::vector<Point2> class_locations;   // representative per class
  Eigen::MatrixXd points;                // all training fingerprints, row-major by row
  std::vector<PairwiseSvm> pairs;
};

OvoModel ovo_train(const FingerprintDb& db, double c_penalty, const KernelSpec& spec,
                   const SmoOptions& opts = {});

// Pairwise vote count per class, aligned with class_ids.
std::vector<int> ovo_votes(const OvoModel& model, const std::vector<double>& x);

// Highest-vote class; ties take the smallest class id.
int ovo_classify(const OvoModel& model, const std::vector<double>& x);

// Mean representative location of the k_top highest-vote classes.
Point2 svm_localize(const OvoModel& model, const std::vector<double>& x, int k_top);

}  // namespace fploc
