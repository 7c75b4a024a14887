#include "relml/lsml.hpp"

#include <cmath>
#include <limits>

#include "relml/error.hpp"

namespace relml {

namespace {
constexpr double kEigenFloor = 1e-8;
constexpr double kTinyDistance = 1e-12;
}  // namespace

void LsmlConfig::validate() const {
  if (!(margin >= 0.0)) throw Error(ErrorCode::InvalidArgument, "LSML margin must be non-negative");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "LSML tolerance must be positive");
  if (!(initial_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "LSML step must be positive");
  if (prior && !(prior->min_eigenvalue() > 0.0))
    throw Error(ErrorCode::NotPsd, "LSML prior must be positive definite");
}

LsmlObjective::LsmlObjective(const FeatureMatrix& features, const RelativeTripleSet& comparisons,
                             const Eigen::MatrixXd& prior, double margin)
    : margin_(margin) {
  const auto n = static_cast<Eigen::Index>(comparisons.size());
  const auto d = features.cols();
  if (prior.rows() != d || prior.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "LSML prior does not match the feature dimension");
  ij_.resize(n, d);
  kl_.resize(n, d);
  const auto rows = static_cast<std::size_t>(features.rows());
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& cmp = comparisons.comparisons[static_cast<std::size_t>(c)];
    if (cmp.i >= rows || cmp.j >= rows || cmp.k >= rows || cmp.l >= rows)
      throw Error(ErrorCode::UnknownEntity, "LSML comparison refers to a missing row");
    ij_.row(c) = features.row(static_cast<Eigen::Index>(cmp.i)) - features.row(static_cast<Eigen::Index>(cmp.j));
    kl_.row(c) = features.row(static_cast<Eigen::Index>(cmp.k)) - features.row(static_cast<Eigen::Index>(cmp.l));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(prior);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPsd, "LSML prior must be positive definite");
  prior_inverse_ = prior.inverse();
  prior_logdet_ = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double LsmlObjective::comparison_loss(const Eigen::MatrixXd& m) const {
  const Eigen::VectorXd dij = (ij_ * m).cwiseProduct(ij_).rowwise().sum();
  const Eigen::VectorXd dkl = (kl_ * m).cwiseProduct(kl_).rowwise().sum();
  double loss = 0.0;
  for (Eigen::Index c = 0; c < dij.size(); ++c) {
    const double r = std::sqrt(std::max(dij(c), 0.0)) + margin_ - std::sqrt(std::max(dkl(c), 0.0));
    if (r > 0.0) loss += r * r;
  }
  return loss;
}

double LsmlObjective::regularizer(const Eigen::MatrixXd& m) const {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  if (!std::isfinite(logdet)) return std::numeric_limits<double>::infinity();
  return (prior_inverse_.cwiseProduct(m)).sum() - (logdet - prior_logdet_) -
         static_cast<double>(m.rows());
}

Eigen::MatrixXd LsmlObjective::gradient(const Eigen::MatrixXd& m) const {
  Eigen::MatrixXd g = prior_inverse_ - m.inverse();
  const Eigen::VectorXd dij = (ij_ * m).cwiseProduct(ij_).rowwise().sum();
  const Eigen::VectorXd dkl = (kl_ * m).cwiseProduct(kl_).rowwise().sum();
  for (Eigen::Index c = 0; c < dij.size(); ++c) {
    const double sa = std::sqrt(std::max(dij(c), 0.0));
    const double sc = std::sqrt(std::max(dkl(c), 0.0));
    const double r = sa + margin_ - sc;
    if (r <= 0.0) continue;
    g.noalias() += (r / std::max(sa, kTinyDistance)) * ij_.row(c).transpose() * ij_.row(c);
    g.noalias() -= (r / std::max(sc, kTinyDistance)) * kl_.row(c).transpose() * kl_.row(c);
  }
  return 0.5 * (g + g.transpose());
}

std::size_t LsmlObjective::violated(const Eigen::MatrixXd& m) const {
  const Eigen::VectorXd dij = (ij_ * m).cwiseProduct(ij_).rowwise().sum();
  const Eigen::VectorXd dkl = (kl_ * m).cwiseProduct(kl_).rowwise().sum();
  std::size_t count = 0;
  for (Eigen::Index c = 0; c < dij.size(); ++c)
    if (std::sqrt(std::max(dij(c), 0.0)) + margin_ > std::sqrt(std::max(dkl(c), 0.0))) ++count;
  return count;
}

LsmlResult lsml_fit(const FeatureMatrix& features, const RelativeTripleSet& comparisons,
                    const LsmlConfig& config) {
  config.validate();
  const auto d = static_cast<std::size_t>(features.cols());
  MahalanobisMetric prior = config.prior.value_or(MahalanobisMetric::identity(d));
  if (prior.dim() != d)
    throw Error(ErrorCode::DimensionMismatch, "LSML prior does not match the feature dimension");
  LsmlResult result{prior, 0, false, false, false, 0.0, 0.0, {}};
  if (comparisons.empty()) {
    result.empty_constraints = true;
    result.converged = true;
    return result;
  }

  const LsmlObjective objective(features, comparisons, prior.matrix(), config.margin);
  Eigen::MatrixXd m = prior.matrix();
  double loss = objective.loss(m);
  result.initial_loss = loss;
  double step = config.initial_step;

  for (std::size_t it = 1; it <= config.max_iter; ++it) {
    const Eigen::MatrixXd g = objective.gradient(m);
    const double gnorm = g.norm();
    if (gnorm < config.tol) {
      result.converged = true;
      break;
    }
    bool accepted = false;
    Eigen::MatrixXd candidate;
    double candidate_loss = loss;
    for (std::size_t b = 0; b <= config.max_backtracks; ++b) {
      candidate = project_psd(m - (step / gnorm) * g, kEigenFloor).matrix();
      candidate_loss = objective.loss(candidate);
      if (candidate_loss < loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.stalled = true;
      break;
    }
    const double decrease = (loss - candidate_loss) / std::max(1.0, std::abs(loss));
    m = std::move(candidate);
    loss = candidate_loss;
    result.iterations = it;
    result.log.push_back({it, loss, step, objective.violated(m), min_eigenvalue(m)});
    step *= 2.0;
    if (decrease < config.tol) {
      result.converged = true;
      break;
    }
  }
  result.final_loss = loss;
  result.metric = MahalanobisMetric(m);
  return result;
}

}  // namespace relml
