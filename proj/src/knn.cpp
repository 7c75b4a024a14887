#include "relml/knn.hpp"

#include "relml/error.hpp"
#include "relml/kernels.hpp"

namespace relml {

namespace {

void check_inputs(const MahalanobisMetric& metric, const FeatureMatrix& train,
                  std::span<const ClassId> labels, std::size_t query_dim, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (labels.size() != static_cast<std::size_t>(train.rows()))
    throw Error(ErrorCode::DimensionMismatch, "one label per training row is required");
  if (static_cast<std::size_t>(train.rows()) < k)
    throw Error(ErrorCode::TooFewTrainingPoints,
                std::to_string(train.rows()) + " training points for k = " + std::to_string(k));
  if (metric.dim() != static_cast<std::size_t>(train.cols()) || query_dim != metric.dim())
    throw Error(ErrorCode::DimensionMismatch, "metric, training and query dimensions differ");
}

}  // namespace

ClassId knn_predict(const MahalanobisMetric& metric, const FeatureMatrix& train,
                    std::span<const ClassId> labels, std::span<const double> query, std::size_t k) {
  check_inputs(metric, train, labels, query.size(), k);
  std::vector<double> distances, scratch;
  std::vector<std::size_t> order;
  return kernels::knn_vote(metric.matrix(), train, labels, query.data(), k, distances, order, scratch);
}

std::vector<ClassId> knn_predict_batch(const MahalanobisMetric& metric, const FeatureMatrix& train,
                                       std::span<const ClassId> labels,
                                       const FeatureMatrix& queries, std::size_t k) {
  check_inputs(metric, train, labels, static_cast<std::size_t>(queries.cols()), k);
  return kernels::omp::knn_predict_batch(metric.matrix(), train, labels, queries, k);
}

double accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth) {
  if (predicted.size() != truth.size())
    throw Error(ErrorCode::DimensionMismatch, "prediction and truth lengths differ");
  if (predicted.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == truth[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

}  // namespace relml
