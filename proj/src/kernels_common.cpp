#include <algorithm>
#include <map>

#include "relml/error.hpp"
#include "relml/kernels.hpp"

#ifdef RELML_HAVE_OPENMP
#include <omp.h>
#endif

namespace relml::kernels {

double quadratic_form_distance(const Eigen::MatrixXd& m, const double* x, const double* y,
                               std::size_t d, double* scratch) {
  for (std::size_t a = 0; a < d; ++a) scratch[a] = x[a] - y[a];
  double total = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    const double va = scratch[a];
    if (va == 0.0) continue;
    double row = 0.0;
    // Column-major storage: walk down column a, using symmetry M(b, a) = M(a, b).
    const double* col = m.data() + a * d;
    for (std::size_t b = 0; b < d; ++b) row += col[b] * scratch[b];
    total += va * row;
  }
  return total > 0.0 ? total : 0.0;
}

ClassId knn_vote(const Eigen::MatrixXd& m, const FeatureMatrix& train,
                 std::span<const ClassId> labels, const double* query, std::size_t k,
                 std::vector<double>& distances, std::vector<std::size_t>& order,
                 std::vector<double>& scratch) {
  const auto n = static_cast<std::size_t>(train.rows());
  const auto d = static_cast<std::size_t>(train.cols());
  distances.resize(n);
  order.resize(n);
  scratch.resize(d);
  for (std::size_t t = 0; t < n; ++t) {
    distances[t] = quadratic_form_distance(m, train.row(static_cast<Eigen::Index>(t)).data(), query, d,
                                           scratch.data());
    order[t] = t;
  }
  auto closer = [&](std::size_t a, std::size_t b) {
    return distances[a] < distances[b] || (distances[a] == distances[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);

  std::map<ClassId, std::size_t> votes;
  for (std::size_t r = 0; r < k; ++r) ++votes[labels[order[r]]];
  ClassId best = votes.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_count) {  // ascending iteration keeps the smallest id on ties
      best = label;
      best_count = count;
    }
  }
  return best;
}

int max_threads() {
#ifdef RELML_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int threads) {
#ifdef RELML_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace relml::kernels
