#include "relml/metric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "relml/error.hpp"
#include "relml/io.hpp"
#include "relml/kernels.hpp"
#include "relml/random.hpp"

namespace relml {

namespace {

double scale_of(const Eigen::MatrixXd& m) {
  return std::max(1.0, m.cwiseAbs().maxCoeff());
}

void require_square(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "metric matrix must be square and non-empty");
}

}  // namespace

bool is_symmetric(const Eigen::MatrixXd& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tolerance * scale_of(m);
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

MahalanobisMetric::MahalanobisMetric(Eigen::MatrixXd m) : m_(std::move(m)) {
  require_square(m_);
  if (!m_.allFinite()) throw Error(ErrorCode::NumericalFailure, "metric has non-finite entries");
  if (!is_symmetric(m_)) throw Error(ErrorCode::NonSymmetric, "metric matrix is not symmetric");
  m_ = (0.5 * (m_ + m_.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m_, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  if (ev.minCoeff() < -kPsdTolerance * std::max(1.0, ev.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NotPsd, "metric matrix has a negative eigenvalue");
}

MahalanobisMetric MahalanobisMetric::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return MahalanobisMetric(Eigen::MatrixXd::Identity(n, n));
}

double MahalanobisMetric::min_eigenvalue() const { return relml::min_eigenvalue(m_); }

double squared_distance(const MahalanobisMetric& metric, std::span<const double> x,
                        std::span<const double> y) {
  if (x.size() != metric.dim() || y.size() != metric.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "points of dimension " + std::to_string(x.size()) + "/" + std::to_string(y.size()) +
                    " for a metric of dimension " + std::to_string(metric.dim()));
  std::vector<double> scratch(x.size());
  return kernels::quadratic_form_distance(metric.matrix(), x.data(), y.data(), x.size(), scratch.data());
}

Eigen::MatrixXd linear_projection(const Eigen::MatrixXd& m) {
  require_square(m);
  if (!is_symmetric(m)) throw Error(ErrorCode::NonSymmetric, "matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  const auto& ev = solver.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() < -kPsdTolerance * std::max(1.0, top))
    throw Error(ErrorCode::NotPsd, "matrix has a negative eigenvalue");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > kRankTolerance * top) keep.push_back(i);
  Eigen::MatrixXd l(static_cast<Eigen::Index>(keep.size()), m.cols());
  for (std::size_t r = 0; r < keep.size(); ++r)
    l.row(static_cast<Eigen::Index>(r)) = std::sqrt(ev(keep[r])) * solver.eigenvectors().col(keep[r]).transpose();
  return l;
}

Eigen::MatrixXd linear_projection(const MahalanobisMetric& metric) {
  return linear_projection(metric.matrix());
}

MahalanobisMetric project_psd(const Eigen::MatrixXd& m, double floor) {
  require_square(m);
  if (!is_symmetric(m)) throw Error(ErrorCode::NonSymmetric, "matrix is not symmetric");
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalFailure, "eigendecomposition failed");
  const Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(floor);
  const auto& v = solver.eigenvectors();
  Eigen::MatrixXd out = v * clipped.asDiagonal() * v.transpose();
  out = (0.5 * (out + out.transpose())).eval();
  return MahalanobisMetric(std::move(out));
}

Thresholds estimate_thresholds(const FeatureMatrix& features, std::size_t sample_size,
                               std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (n < 2) throw Error(ErrorCode::NotEnoughEntities, "thresholds need at least two points");
  if (sample_size == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be positive");
  Rng rng(seed);
  std::vector<double> dist;
  dist.reserve(sample_size);
  while (dist.size() < sample_size) {
    const auto i = static_cast<Eigen::Index>(rng.uniform_index(n));
    const auto j = static_cast<Eigen::Index>(rng.uniform_index(n));
    if (i == j) continue;
    dist.push_back((features.row(i) - features.row(j)).squaredNorm());
  }
  std::sort(dist.begin(), dist.end());
  auto percentile = [&](double q) {
    const double pos = q * static_cast<double>(dist.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, dist.size() - 1);
    return dist[lo] + (pos - static_cast<double>(lo)) * (dist[hi] - dist[lo]);
  };
  if (dist.back() <= 0.0) return {0.1, 1.0, true};
  double u = percentile(0.05);
  double l = percentile(0.95);
  if (u <= 0.0) u = *std::upper_bound(dist.begin(), dist.end(), 0.0);
  if (l <= u) l = 10.0 * u;
  return {u, l, false};
}

void write_metric(std::ostream& out, const MahalanobisMetric& metric) {
  const auto& m = metric.matrix();
  out << "mahalanobis " << metric.dim() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

MahalanobisMetric read_metric(std::istream& in) {
  std::string tag;
  std::size_t d = 0;
  if (!(in >> tag >> d) || tag != "mahalanobis" || d == 0)
    throw Error(ErrorCode::MalformedInput, "expected 'mahalanobis <dim>' header");
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd m(n, n);
  std::string token;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!(in >> token)) throw Error(ErrorCode::MalformedInput, "truncated metric file");
      double v = 0.0;
      auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw Error(ErrorCode::MalformedInput, "bad metric entry '" + token + "'");
      m(r, c) = v;
    }
  return MahalanobisMetric(std::move(m));
}

void save_metric(const std::filesystem::path& path, const MahalanobisMetric& metric) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  write_metric(out, metric);
}

MahalanobisMetric load_metric(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return read_metric(in);
}

}  // namespace relml
