#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relml/metric.hpp"
#include "relml/schema.hpp"

namespace relml {

/// Majority label among the k training rows closest to `query` under the
/// metric. Distance ties go to the smaller training index, vote ties to the
/// smaller class id. Throws TooFewTrainingPoints when train has fewer than k
/// rows and DimensionMismatch on shape errors.
ClassId knn_predict(const MahalanobisMetric& metric, const FeatureMatrix& train,
                    std::span<const ClassId> labels, std::span<const double> query, std::size_t k);

/// knn_predict for every row of `queries` (parallel kernel).
std::vector<ClassId> knn_predict_batch(const MahalanobisMetric& metric, const FeatureMatrix& train,
                                       std::span<const ClassId> labels,
                                       const FeatureMatrix& queries, std::size_t k);

/// Fraction of positions where predicted equals truth; 0 for empty input.
double accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth);

}  // namespace relml
