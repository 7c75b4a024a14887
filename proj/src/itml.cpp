#include "relml/itml.hpp"

#include <cmath>

#include "relml/error.hpp"
#include "relml/log.hpp"

namespace relml {

namespace {
constexpr double kBreakdown = 1e-12;
}

void ItmlConfig::validate() const {
  if (!(u > 0.0 && u < l)) throw Error(ErrorCode::InvalidArgument, "ITML needs 0 < u < l");
  if (!(slack > 0.0)) throw Error(ErrorCode::InvalidArgument, "ITML slack must be positive");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "ITML tolerance must be positive");
}

std::size_t count_satisfied(const FeatureMatrix& features, const PairConstraintSet& pairs,
                            const MahalanobisMetric& metric, double u, double l) {
  std::size_t ok = 0;
  for (const auto& p : pairs.similar)
    if (squared_distance(metric, row_span(features, p.a), row_span(features, p.b)) <= u) ++ok;
  for (const auto& p : pairs.dissimilar)
    if (squared_distance(metric, row_span(features, p.a), row_span(features, p.b)) >= l) ++ok;
  return ok;
}

ItmlResult itml_fit(const FeatureMatrix& features, const PairConstraintSet& pairs,
                    const ItmlConfig& config) {
  config.validate();
  const auto d = features.cols();
  MahalanobisMetric prior = config.prior.value_or(MahalanobisMetric::identity(static_cast<std::size_t>(d)));
  if (static_cast<Eigen::Index>(prior.dim()) != d)
    throw Error(ErrorCode::DimensionMismatch, "ITML prior does not match the feature dimension");
  for (const auto* side : {&pairs.similar, &pairs.dissimilar})
    for (const auto& p : *side)
      if (p.b >= static_cast<std::size_t>(features.rows()))
        throw Error(ErrorCode::UnknownEntity, "ITML constraint refers to a missing row");

  ItmlResult result{prior, 0, false, false, 0, {}};
  if (pairs.empty()) {
    result.empty_constraints = true;
    result.converged = true;
    return result;
  }

  // Difference vectors; zero-length pairs carry no information and are dropped.
  struct Constraint {
    Eigen::VectorXd v;
    int sign;  // +1 similar, -1 dissimilar
  };
  std::vector<Constraint> cons;
  for (const auto& p : pairs.similar) {
    Eigen::VectorXd v = (features.row(static_cast<Eigen::Index>(p.a)) - features.row(static_cast<Eigen::Index>(p.b))).transpose();
    if (v.squaredNorm() > kBreakdown) cons.push_back({std::move(v), +1});
    else ++result.skipped;
  }
  for (const auto& p : pairs.dissimilar) {
    Eigen::VectorXd v = (features.row(static_cast<Eigen::Index>(p.a)) - features.row(static_cast<Eigen::Index>(p.b))).transpose();
    if (v.squaredNorm() > kBreakdown) cons.push_back({std::move(v), -1});
    else ++result.skipped;
  }
  if (cons.empty()) {
    result.empty_constraints = true;
    result.converged = true;
    return result;
  }

  const double slack = config.slack;
  const double gamma_proj = std::isinf(slack) ? 1.0 : slack / (slack + 1.0);
  const double inv_slack = std::isinf(slack) ? 0.0 : 1.0 / slack;
  const auto nc = static_cast<Eigen::Index>(cons.size());
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(nc);
  Eigen::VectorXd lambda_old = Eigen::VectorXd::Zero(nc);
  Eigen::VectorXd bhat(nc);
  for (Eigen::Index c = 0; c < nc; ++c) bhat(c) = cons[static_cast<std::size_t>(c)].sign > 0 ? config.u : config.l;

  Eigen::MatrixXd a = prior.matrix();
  Eigen::VectorXd av(d);
  for (std::size_t sweep = 1; sweep <= config.max_iter; ++sweep) {
    for (Eigen::Index c = 0; c < nc; ++c) {
      const auto& con = cons[static_cast<std::size_t>(c)];
      av.noalias() = a * con.v;
      const double p = con.v.dot(av);
      if (p < kBreakdown) {
        ++result.skipped;
        continue;
      }
      double alpha, denom;
      if (con.sign > 0) {
        alpha = std::min(lambda(c), gamma_proj * (1.0 / p - 1.0 / bhat(c)));
        denom = 1.0 - alpha * p;
      } else {
        alpha = std::min(lambda(c), gamma_proj * (1.0 / bhat(c) - 1.0 / p));
        denom = 1.0 + alpha * p;
      }
      if (std::abs(denom) < kBreakdown) {
        ++result.skipped;
        continue;
      }
      lambda(c) -= alpha;
      const double beta = con.sign * alpha / denom;
      bhat(c) = 1.0 / (1.0 / bhat(c) + con.sign * alpha * inv_slack);
      a.noalias() += beta * av * av.transpose();
    }
    a = (0.5 * (a + a.transpose())).eval();
    double min_eig = min_eigenvalue(a);
    if (min_eig < 0.0) {
      a = project_psd(a).matrix();
      min_eig = min_eigenvalue(a);
    }
    if (!a.allFinite()) throw Error(ErrorCode::NumericalFailure, "ITML diverged");

    const double normsum = lambda.norm() + lambda_old.norm();
    const double conv = normsum == 0.0 ? 0.0 : (lambda_old - lambda).cwiseAbs().sum() / normsum;
    result.iterations = sweep;
    MahalanobisMetric current(a);
    result.log.push_back({sweep, conv,
                          count_satisfied(features, pairs, current, config.u, config.l), min_eig});
    if (conv < config.tol) {
      result.converged = true;
      break;
    }
    lambda_old = lambda;
  }
  if (!result.converged)
    log_debug("ITML stopped after " + std::to_string(result.iterations) + " sweeps without converging");
  result.metric = MahalanobisMetric(a);
  return result;
}

}  // namespace relml
