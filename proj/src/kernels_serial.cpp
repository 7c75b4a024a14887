#include "relml/error.hpp"
#include "relml/kernels.hpp"

namespace relml::kernels::serial {

void link_strength_batch(const ParentIndex& index, const LinkStrengthParams& params,
                         std::span<const EntityPair> pairs, std::span<double> out) {
  if (out.size() != pairs.size())
    throw Error(ErrorCode::DimensionMismatch, "output span does not match pair count");
  for (std::size_t p = 0; p < pairs.size(); ++p)
    out[p] = link_strength(index, params, pairs[p].a, pairs[p].b);
}

void squared_distances(const Eigen::MatrixXd& m, const FeatureMatrix& points,
                       std::span<const EntityPair> pairs, std::span<double> out) {
  if (out.size() != pairs.size())
    throw Error(ErrorCode::DimensionMismatch, "output span does not match pair count");
  const auto d = static_cast<std::size_t>(points.cols());
  std::vector<double> scratch(d);
  for (std::size_t p = 0; p < pairs.size(); ++p)
    out[p] = quadratic_form_distance(m, points.row(static_cast<Eigen::Index>(pairs[p].a)).data(),
                                     points.row(static_cast<Eigen::Index>(pairs[p].b)).data(), d,
                                     scratch.data());
}

std::vector<ClassId> knn_predict_batch(const Eigen::MatrixXd& m, const FeatureMatrix& train,
                                       std::span<const ClassId> labels,
                                       const FeatureMatrix& queries, std::size_t k) {
  std::vector<ClassId> out(static_cast<std::size_t>(queries.rows()));
  std::vector<double> distances, scratch;
  std::vector<std::size_t> order;
  for (Eigen::Index q = 0; q < queries.rows(); ++q)
    out[static_cast<std::size_t>(q)] =
        knn_vote(m, train, labels, queries.row(q).data(), k, distances, order, scratch);
  return out;
}

}  // namespace relml::kernels::serial
