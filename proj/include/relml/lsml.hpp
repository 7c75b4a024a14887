#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "relml/constraints.hpp"
#include "relml/metric.hpp"

namespace relml {

struct LsmlConfig {
  std::optional<MahalanobisMetric> prior;  ///< identity when unset; must be positive definite
  double margin = 0.0;
  std::size_t max_iter = 1000;
  double tol = 1e-6;
  double initial_step = 1.0;  ///< first trial step, in Frobenius norm of the update
  std::size_t max_backtracks = 40;

  void validate() const;
};

/// Least-squares relative-comparison objective:
///   sum over violated comparisons of (sqrt(D_ij) + margin - sqrt(D_kl))^2
///   + LogDet divergence of M from the prior,
/// where D is the squared Mahalanobis distance. A comparison is violated when
/// sqrt(D_ij) + margin > sqrt(D_kl).
class LsmlObjective {
 public:
  LsmlObjective(const FeatureMatrix& features, const RelativeTripleSet& comparisons,
                const Eigen::MatrixXd& prior, double margin);

  double comparison_loss(const Eigen::MatrixXd& m) const;
  /// tr(P^-1 M) - log det(P^-1 M) - d; +inf when M is not positive definite.
  double regularizer(const Eigen::MatrixXd& m) const;
  double loss(const Eigen::MatrixXd& m) const { return comparison_loss(m) + regularizer(m); }
  /// Symmetric gradient G with dL = tr(G dM).
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& m) const;
  std::size_t violated(const Eigen::MatrixXd& m) const;

 private:
  Eigen::MatrixXd ij_;  ///< rows x_i - x_j
  Eigen::MatrixXd kl_;  ///< rows x_k - x_l
  Eigen::MatrixXd prior_inverse_;
  double prior_logdet_;
  double margin_;
};

struct LsmlStep {
  std::size_t iteration;
  double loss;
  double step;
  std::size_t violated;
  double min_eigenvalue;
};

struct LsmlResult {
  MahalanobisMetric metric;
  std::size_t iterations = 0;
  bool converged = false;
  bool empty_constraints = false;
  bool stalled = false;  ///< backtracking found no decrease before convergence
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<LsmlStep> log;  ///< one entry per accepted step
};

/// Gradient descent with backtracking line search; each trial point is
/// projected onto the PSD cone (eigenvalues floored at 1e-8 so the LogDet
/// term stays finite). Returns the prior when there are no comparisons.
LsmlResult lsml_fit(const FeatureMatrix& features, const RelativeTripleSet& comparisons,
                    const LsmlConfig& config);

}  // namespace relml
