#include "relml/link_strength.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relml/error.hpp"
#include "relml/kernels.hpp"

namespace relml {

LinkStrengthParams::LinkStrengthParams(double g, std::size_t a, std::size_t b)
    : gamma(g), alpha(a), beta(b) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0, 1]");
  if (alpha + beta == 0)
    throw Error(ErrorCode::NoAssociationAttributes, "link strength needs at least one attribute");
}

LinkStrengthParams LinkStrengthParams::balanced(std::size_t alpha, std::size_t beta) {
  return LinkStrengthParams(default_gamma(alpha, beta), alpha, beta);
}

double default_gamma(std::size_t alpha, std::size_t beta) {
  if (alpha + beta == 0)
    throw Error(ErrorCode::NoAssociationAttributes, "alpha + beta must be at least 1");
  return static_cast<double>(alpha) / static_cast<double>(alpha + beta);
}

double numeric_affinity(const AssociationTable& assoc, std::size_t row_i, std::size_t row_j) {
  double w = 0.0;
  for (std::size_t m = 0; m < assoc.alpha(); ++m) {
    const double vi = assoc.numeric(row_i, m);
    const double vj = assoc.numeric(row_j, m);
    if (std::isnan(vi) || std::isnan(vj)) continue;
    w += std::exp(-std::abs(vi - vj));
  }
  return w;
}

double categorical_affinity(const AssociationTable& assoc, std::size_t row_i, std::size_t row_j) {
  double z = 0.0;
  for (std::size_t m = 0; m < assoc.beta(); ++m) {
    const auto ci = assoc.category(row_i, m);
    const auto cj = assoc.category(row_j, m);
    if (ci == AssociationTable::kMissingCategory || cj == AssociationTable::kMissingCategory) continue;
    if (ci == cj) z += 1.0;
  }
  return z;
}

namespace {

std::pair<std::size_t, std::size_t> rows_for(const ParentIndex& index, std::size_t parent,
                                             std::size_t i, std::size_t j) {
  auto find_row = [&](std::size_t child) -> std::optional<std::size_t> {
    const auto links = index.parents_of(child);
    auto it = std::lower_bound(links.begin(), links.end(), parent,
                               [](const ParentLink& l, std::size_t p) { return l.parent < p; });
    if (it == links.end() || it->parent != parent) return std::nullopt;
    return it->row;
  };
  if (i == j) throw Error(ErrorCode::InvalidArgument, "affinity needs two distinct children");
  const auto ri = find_row(i);
  const auto rj = find_row(j);
  if (!ri || !rj)
    throw Error(ErrorCode::ParentNotCommon, "parent " + std::to_string(parent) +
                                                " is not linked to both " + std::to_string(i) +
                                                " and " + std::to_string(j));
  return {*ri, *rj};
}

void check_params(const ParentIndex& index, const LinkStrengthParams& params) {
  const auto& a = index.association();
  if (params.alpha != a.alpha() || params.beta != a.beta())
    throw Error(ErrorCode::InvalidArgument,
                "link strength parameters were built for a different attribute layout");
}

}  // namespace

double numeric_affinity(const ParentIndex& index, std::size_t parent, std::size_t i, std::size_t j) {
  const auto [ri, rj] = rows_for(index, parent, i, j);
  return numeric_affinity(index.association(), ri, rj);
}

double categorical_affinity(const ParentIndex& index, std::size_t parent, std::size_t i,
                            std::size_t j) {
  const auto [ri, rj] = rows_for(index, parent, i, j);
  return categorical_affinity(index.association(), ri, rj);
}

double link_strength(const ParentIndex& index, const LinkStrengthParams& params, std::size_t i,
                     std::size_t j) {
  check_params(index, params);
  const auto& assoc = index.association();
  double total = 0.0;
  for (const auto& cp : index.common_parents(i, j)) {
    const double w = numeric_affinity(assoc, cp.row_i, cp.row_j);
    const double z = categorical_affinity(assoc, cp.row_i, cp.row_j);
    total += params.gamma * w + (1.0 - params.gamma) * z;
  }
  return total;
}

LinkStrengthBreakdown explain_link_strength(const ParentIndex& index,
                                            const LinkStrengthParams& params, std::size_t i,
                                            std::size_t j) {
  check_params(index, params);
  const auto& assoc = index.association();
  LinkStrengthBreakdown out{i, j, params.gamma, {}, 0.0};
  for (const auto& cp : index.common_parents(i, j)) {
    const double w = numeric_affinity(assoc, cp.row_i, cp.row_j);
    const double z = categorical_affinity(assoc, cp.row_i, cp.row_j);
    const double term = params.gamma * w + (1.0 - params.gamma) * z;
    out.parents.push_back({cp.parent, cp.row_i, cp.row_j, w, z, term});
    out.total += term;
  }
  return out;
}

LinkStrengthTable link_strength_table(const ParentIndex& index, const LinkStrengthParams& params,
                                      std::span<const EntityPair> pairs) {
  std::vector<double> values(pairs.size());
  kernels::omp::link_strength_batch(index, params, pairs, values);
  LinkStrengthTable table;
  table.reserve(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) table.push_back({pairs[p], values[p]});
  return table;
}

}  // namespace relml
