#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "relml/constraints.hpp"
#include "relml/metric.hpp"

namespace relml {

struct ItmlConfig {
  double u = 1.0;      ///< upper bound on squared distance of similar pairs
  double l = 10.0;     ///< lower bound on squared distance of dissimilar pairs
  double slack = 1.0;  ///< constraint/regularization tradeoff; +inf = hard constraints
  std::optional<MahalanobisMetric> prior;  ///< identity when unset
  std::size_t max_iter = 1000;             ///< sweeps over all constraints
  double tol = 1e-3;

  void validate() const;
};

struct ItmlSweep {
  std::size_t sweep;
  double convergence;     ///< relative change of the multipliers
  std::size_t satisfied;  ///< constraints met by the metric after the sweep
  double min_eigenvalue;
};

struct ItmlResult {
  MahalanobisMetric metric;
  std::size_t iterations = 0;
  bool converged = false;
  bool empty_constraints = false;
  std::size_t skipped = 0;  ///< zero-length pairs and near-zero denominators
  std::vector<ItmlSweep> log;
};

/// Information-theoretic metric learning: cyclic Bregman projections under
/// the LogDet divergence to the prior, with slack variables on the u / l
/// bounds. Pair ids index rows of `features`. Returns the prior unchanged
/// when there are no constraints.
ItmlResult itml_fit(const FeatureMatrix& features, const PairConstraintSet& pairs,
                    const ItmlConfig& config);

/// Constraints of `pairs` satisfied by `metric` (S: D^2 <= u, D: D^2 >= l).
std::size_t count_satisfied(const FeatureMatrix& features, const PairConstraintSet& pairs,
                            const MahalanobisMetric& metric, double u, double l);

}  // namespace relml
