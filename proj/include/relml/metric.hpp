#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>

#include "relml/schema.hpp"

namespace relml {

/// Tolerances shared by the metric code.
inline constexpr double kSymmetryTolerance = 1e-9;
inline constexpr double kPsdTolerance = 1e-8;
inline constexpr double kRankTolerance = 1e-10;  ///< relative to the largest eigenvalue

/// Symmetric positive semi-definite d x d matrix defining
/// D^2(x, y) = (x - y)^T M (x - y).
class MahalanobisMetric {
 public:
  /// Throws NonSymmetric if |M - M^T| exceeds the tolerance and NotPsd if an
  /// eigenvalue is below -1e-8. The stored matrix is exactly symmetric.
  explicit MahalanobisMetric(Eigen::MatrixXd m);

  static MahalanobisMetric identity(std::size_t d);

  const Eigen::MatrixXd& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  double min_eigenvalue() const;

  bool operator==(const MahalanobisMetric& other) const { return m_ == other.m_; }

 private:
  Eigen::MatrixXd m_;
};

/// (x - y)^T M (x - y), clamped at 0. Throws DimensionMismatch.
double squared_distance(const MahalanobisMetric& metric, std::span<const double> x,
                        std::span<const double> y);

inline std::span<const double> row_span(const FeatureMatrix& features, std::size_t row) {
  return {features.row(static_cast<Eigen::Index>(row)).data(), static_cast<std::size_t>(features.cols())};
}

/// L (k x d, k = numerical rank) with L^T L = M.
Eigen::MatrixXd linear_projection(const MahalanobisMetric& metric);
/// Same for a raw symmetric matrix; throws NotPsd when it has a negative
/// eigenvalue below -1e-8 (relative to max(1, |lambda|max)).
Eigen::MatrixXd linear_projection(const Eigen::MatrixXd& m);

/// Nearest PSD matrix in Frobenius norm: eigenvalues clipped at `floor`
/// (0 by default). Throws NonSymmetric.
MahalanobisMetric project_psd(const Eigen::MatrixXd& m, double floor = 0.0);

/// Symmetric input check with the shared tolerance, scaled by max(1, |m|max).
bool is_symmetric(const Eigen::MatrixXd& m, double tolerance = kSymmetryTolerance);
double min_eigenvalue(const Eigen::MatrixXd& m);

struct Thresholds {
  double u;
  double l;
  bool degenerate;  ///< all sampled points coincided; (0.1, 1.0) fallback used
};

/// u = 5th and l = 95th percentile (linear interpolation) of squared
/// Euclidean distances over `sample_size` random pairs. Guarantees
/// 0 < u < l: a zero u is replaced by the smallest positive sampled distance,
/// and u == l is widened to l = 10 u.
Thresholds estimate_thresholds(const FeatureMatrix& features, std::size_t sample_size,
                               std::uint64_t seed);

/// Text form: "mahalanobis <d>" then d rows of d values, shortest round-trip
/// decimal representation, so that reading back is bit-exact.
void write_metric(std::ostream& out, const MahalanobisMetric& metric);
MahalanobisMetric read_metric(std::istream& in);
void save_metric(const std::filesystem::path& path, const MahalanobisMetric& metric);
MahalanobisMetric load_metric(const std::filesystem::path& path);

}  // namespace relml
