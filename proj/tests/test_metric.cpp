#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "relml/error.hpp"
#include "relml/metric.hpp"
#include "relml/random.hpp"
#include "test_util.hpp"

using namespace relml;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no relml::Error thrown";
  return ErrorCode::InvalidArgument;
}

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

/// Random PSD matrix of the given rank.
Eigen::MatrixXd random_psd(Rng& rng, Eigen::Index d, Eigen::Index rank) {
  const Eigen::MatrixXd a = random_matrix(rng, rank, d);
  return a.transpose() * a;
}

double dist(const MahalanobisMetric& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return squared_distance(m, std::span(x.data(), static_cast<std::size_t>(x.size())),
                          std::span(y.data(), static_cast<std::size_t>(y.size())));
}

}  // namespace

TEST(SquaredDistance, Examples) {
  const auto id = MahalanobisMetric::identity(2);
  EXPECT_EQ(dist(id, Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)), 25.0);
  MahalanobisMetric diag(Eigen::Vector2d(2, 1).asDiagonal().toDenseMatrix());
  EXPECT_EQ(dist(diag, Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0)), 3.0);
  EXPECT_EQ(dist(diag, Eigen::Vector2d(0.3, -2), Eigen::Vector2d(0.3, -2)), 0.0);
  EXPECT_EQ(code_of([&] { dist(id, Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 1, 1)); }),
            ErrorCode::DimensionMismatch);
}

TEST(SquaredDistance, IdentityReducesToEuclidean) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_index(8));
    const Eigen::VectorXd x = random_matrix(rng, d, 1), y = random_matrix(rng, d, 1);
    EXPECT_NEAR(dist(MahalanobisMetric::identity(static_cast<std::size_t>(d)), x, y), (x - y).squaredNorm(), 1e-12);
  }
}

TEST(SquaredDistance, TriangleInequalityAndSymmetry) {
  Rng rng(2);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_index(5));
    const MahalanobisMetric m(random_psd(rng, d, 1 + static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(d)))));
    const Eigen::VectorXd x = random_matrix(rng, d, 1), y = random_matrix(rng, d, 1), z = random_matrix(rng, d, 1);
    const double xy = std::sqrt(dist(m, x, y)), yz = std::sqrt(dist(m, y, z)), xz = std::sqrt(dist(m, x, z));
    EXPECT_LE(xz, xy + yz + 1e-9);
    EXPECT_EQ(dist(m, x, y), dist(m, y, x));
  }
}

TEST(SquaredDistance, ScaleCovariance) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const Eigen::MatrixXd base = random_psd(rng, 3, 3);
    const double c = std::ldexp(1.0, static_cast<int>(rng.uniform_index(10)) - 5);
    const Eigen::VectorXd x = random_matrix(rng, 3, 1), y = random_matrix(rng, 3, 1);
    EXPECT_EQ(dist(MahalanobisMetric(c * base), x, y), c * dist(MahalanobisMetric(base), x, y));
  }
}

TEST(MahalanobisMetric, RejectsInvalidMatrices) {
  Eigen::Matrix2d asym;
  asym << 1, 0.5, 0, 1;
  EXPECT_EQ(code_of([&] { MahalanobisMetric m{Eigen::MatrixXd(asym)}; }), ErrorCode::NonSymmetric);
  EXPECT_EQ(code_of([] { MahalanobisMetric m{Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix()}; }),
            ErrorCode::NotPsd);
}

TEST(LinearProjection, Examples) {
  const auto l = linear_projection(MahalanobisMetric::identity(2));
  EXPECT_TRUE((l.transpose() * l).isApprox(Eigen::Matrix2d::Identity(), 1e-12));
  const auto r = linear_projection(Eigen::MatrixXd(Eigen::Vector2d(4, 0).asDiagonal()));
  ASSERT_EQ(r.rows(), 1);
  EXPECT_NEAR(std::fabs(r(0, 0)), 2.0, 1e-12);
  EXPECT_NEAR(r(0, 1), 0.0, 1e-12);
  EXPECT_EQ(code_of([] { linear_projection(Eigen::MatrixXd(Eigen::Vector2d(1, -1).asDiagonal())); }),
            ErrorCode::NotPsd);
}

TEST(LinearProjection, ReconstructsRandomPsd) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform_index(6));
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(d)));
    const MahalanobisMetric m(random_psd(rng, d, rank));
    const auto l = linear_projection(m);
    EXPECT_EQ(l.rows(), rank);
    EXPECT_LE((l.transpose() * l - m.matrix()).norm() / m.matrix().norm(), 1e-8);
    const Eigen::VectorXd x = random_matrix(rng, d, 1), y = random_matrix(rng, d, 1);
    const double want = std::sqrt(dist(m, x, y));
    EXPECT_NEAR((l * (x - y)).norm(), want, 1e-6 * std::max(1.0, want));
  }
}

TEST(ProjectPsd, ClipsNegativeEigenvalues) {
  const auto out = project_psd(Eigen::MatrixXd(Eigen::Vector2d(1, -2).asDiagonal()));
  EXPECT_TRUE(out.matrix().isApprox(Eigen::MatrixXd(Eigen::Vector2d(1, 0).asDiagonal()), 1e-12));
  Rng rng(5);
  const Eigen::MatrixXd psd = random_psd(rng, 4, 4);
  EXPECT_LE((project_psd(psd).matrix() - psd).cwiseAbs().maxCoeff(), 1e-10);
  Eigen::Matrix2d asym;
  asym << 1, 2, 0, 1;
  EXPECT_EQ(code_of([&] { project_psd(asym); }), ErrorCode::NonSymmetric);
}

TEST(ProjectPsd, NearestAmongSampledCandidates) {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd a = random_matrix(rng, 4, 4);
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    const auto out = project_psd(sym);
    EXPECT_GE(out.min_eigenvalue(), -1e-12);
    const double best = (out.matrix() - sym).norm();
    for (int c = 0; c < 200; ++c) {
      const Eigen::MatrixXd cand = random_psd(rng, 4, 1 + static_cast<Eigen::Index>(rng.uniform_index(4))) * rng.uniform01();
      EXPECT_LE(best, (cand - sym).norm() + 1e-12);
      const Eigen::MatrixXd nudged = project_psd(out.matrix() + 0.01 * random_psd(rng, 4, 1)).matrix();
      EXPECT_LE(best, (nudged - sym).norm() + 1e-12);
    }
  }
}

TEST(ProjectPsd, FloorRaisesSmallEigenvalues) {
  const auto out = project_psd(Eigen::MatrixXd(Eigen::Vector3d(2, 0, -1).asDiagonal()), 1e-8);
  EXPECT_NEAR(out.min_eigenvalue(), 1e-8, 1e-15);
}

TEST(Thresholds, Examples) {
  FeatureMatrix two(2, 2);
  two << 0, 0, 1, 1;
  const auto t2 = estimate_thresholds(two, 100, 0);
  EXPECT_EQ(t2.u, 2.0);
  EXPECT_EQ(t2.l, 20.0);
  EXPECT_FALSE(t2.degenerate);

  Rng rng(7);
  FeatureMatrix normal(100, 2);
  for (Eigen::Index r = 0; r < 100; ++r) normal.row(r) << rng.normal(), rng.normal();
  const auto t = estimate_thresholds(normal, 2000, 1);
  EXPECT_GT(t.u, 0.0);
  EXPECT_LT(t.u, t.l);
  // Expected squared distance between two standard normal 2D points is 4.
  EXPECT_LT(t.u, 4.0);
  EXPECT_GT(t.l, 4.0);

  FeatureMatrix same = FeatureMatrix::Ones(5, 3);
  const auto ts = estimate_thresholds(same, 50, 0);
  EXPECT_TRUE(ts.degenerate);
  EXPECT_EQ(ts.u, 0.1);
  EXPECT_EQ(ts.l, 1.0);
}

TEST(Thresholds, ZeroLowerPercentileUsesSmallestPositive) {
  FeatureMatrix pts(20, 1);
  for (Eigen::Index r = 0; r < 20; ++r) pts(r, 0) = r < 18 ? 0.0 : 1.0 + static_cast<double>(r);
  const auto t = estimate_thresholds(pts, 500, 3);
  EXPECT_GT(t.u, 0.0);
  EXPECT_LT(t.u, t.l);
}

TEST(MetricIo, RoundTripIsBitExact) {
  Rng rng(8);
  const MahalanobisMetric m(random_psd(rng, 5, 5) / 3.0);
  std::stringstream s;
  write_metric(s, m);
  EXPECT_EQ(read_metric(s), m);
  testutil::TempDir dir;
  save_metric(dir / "m.txt", m);
  EXPECT_EQ(load_metric(dir / "m.txt"), m);
  std::stringstream bad("mahalanobis 2\n1 0\n");
  EXPECT_EQ(code_of([&] { read_metric(bad); }), ErrorCode::MalformedInput);
}
