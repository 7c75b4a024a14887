#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference in
// kernels::serial and an OpenMP version in kernels::omp; both produce
// bitwise-identical output (every output element is computed by the same
// scalar code, only the loop scheduling differs).

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "relml/link_strength.hpp"
#include "relml/pair.hpp"
#include "relml/schema.hpp"

namespace relml::kernels {

/// (x - y)^T M (x - y) with a fixed summation order, clamped at 0.
/// `scratch` must hold x.size() doubles.
double quadratic_form_distance(const Eigen::MatrixXd& m, const double* x, const double* y,
                               std::size_t d, double* scratch);

/// Index of the k nearest rows (ties by smaller index) and majority vote
/// among their labels (ties by smaller class id). `distances` is scratch of
/// train.rows() entries.
ClassId knn_vote(const Eigen::MatrixXd& m, const FeatureMatrix& train,
                 std::span<const ClassId> labels, const double* query, std::size_t k,
                 std::vector<double>& distances, std::vector<std::size_t>& order,
                 std::vector<double>& scratch);

namespace serial {

void link_strength_batch(const ParentIndex& index, const LinkStrengthParams& params,
                         std::span<const EntityPair> pairs, std::span<double> out);

void squared_distances(const Eigen::MatrixXd& m, const FeatureMatrix& points,
                       std::span<const EntityPair> pairs, std::span<double> out);

std::vector<ClassId> knn_predict_batch(const Eigen::MatrixXd& m, const FeatureMatrix& train,
                                       std::span<const ClassId> labels,
                                       const FeatureMatrix& queries, std::size_t k);

}  // namespace serial

namespace omp {

void link_strength_batch(const ParentIndex& index, const LinkStrengthParams& params,
                         std::span<const EntityPair> pairs, std::span<double> out);

void squared_distances(const Eigen::MatrixXd& m, const FeatureMatrix& points,
                       std::span<const EntityPair> pairs, std::span<double> out);

std::vector<ClassId> knn_predict_batch(const Eigen::MatrixXd& m, const FeatureMatrix& train,
                                       std::span<const ClassId> labels,
                                       const FeatureMatrix& queries, std::size_t k);

}  // namespace omp

/// Threads available to the OpenMP kernels (1 when built without OpenMP).
int max_threads();
void set_threads(int threads);

}  // namespace relml::kernels
