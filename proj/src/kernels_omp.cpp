#include "relml/error.hpp"
#include "relml/kernels.hpp"

namespace relml::kernels::omp {

void link_strength_batch(const ParentIndex& index, const LinkStrengthParams& params,
                         std::span<const EntityPair> pairs, std::span<double> out) {
  if (out.size() != pairs.size())
    throw Error(ErrorCode::DimensionMismatch, "output span does not match pair count");
  // Validate once outside the parallel region; exceptions must not escape it.
  if (!pairs.empty()) out[0] = link_strength(index, params, pairs[0].a, pairs[0].b);
  for (const auto& p : pairs)
    if (p.a == p.b || p.b >= index.n_children())
      throw Error(ErrorCode::UnknownEntity, "invalid pair in link strength batch");

  const auto& assoc = index.association();
  const double gamma = params.gamma;
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t p = 1; p < n; ++p) {
    const auto a = index.parents_of(pairs[p].a);
    const auto b = index.parents_of(pairs[p].b);
    double total = 0.0;
    std::size_t x = 0, y = 0;
    while (x < a.size() && y < b.size()) {
      if (a[x].parent < b[y].parent) {
        ++x;
      } else if (b[y].parent < a[x].parent) {
        ++y;
      } else {
        const double w = numeric_affinity(assoc, a[x].row, b[y].row);
        const double z = categorical_affinity(assoc, a[x].row, b[y].row);
        total += gamma * w + (1.0 - gamma) * z;
        ++x;
        ++y;
      }
    }
    out[static_cast<std::size_t>(p)] = total;
  }
}

void squared_distances(const Eigen::MatrixXd& m, const FeatureMatrix& points,
                       std::span<const EntityPair> pairs, std::span<double> out) {
  if (out.size() != pairs.size())
    throw Error(ErrorCode::DimensionMismatch, "output span does not match pair count");
  const auto d = static_cast<std::size_t>(points.cols());
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel
  {
    std::vector<double> scratch(d);
#pragma omp for schedule(static)
    for (std::ptrdiff_t p = 0; p < n; ++p) {
      const auto& pr = pairs[static_cast<std::size_t>(p)];
      out[static_cast<std::size_t>(p)] = quadratic_form_distance(
          m, points.row(static_cast<Eigen::Index>(pr.a)).data(),
          points.row(static_cast<Eigen::Index>(pr.b)).data(), d, scratch.data());
    }
  }
}

std::vector<ClassId> knn_predict_batch(const Eigen::MatrixXd& m, const FeatureMatrix& train,
                                       std::span<const ClassId> labels,
                                       const FeatureMatrix& queries, std::size_t k) {
  std::vector<ClassId> out(static_cast<std::size_t>(queries.rows()));
  const auto n = static_cast<std::ptrdiff_t>(queries.rows());
#pragma omp parallel
  {
    std::vector<double> distances, scratch;
    std::vector<std::size_t> order;
#pragma omp for schedule(static)
    for (std::ptrdiff_t q = 0; q < n; ++q)
      out[static_cast<std::size_t>(q)] =
          knn_vote(m, train, labels, queries.row(q).data(), k, distances, order, scratch);
  }
  return out;
}

}  // namespace relml::kernels::omp
