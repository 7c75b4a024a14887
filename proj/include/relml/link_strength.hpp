#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relml/pair.hpp"
#include "relml/parent_index.hpp"

namespace relml {

/// Balance between the numeric term w and the categorical term z of the link
/// strength, plus the attribute counts it was built for.
struct LinkStrengthParams {
  double gamma = 1.0;
  std::size_t alpha = 0;
  std::size_t beta = 0;

  /// Validates 0 <= gamma <= 1 and alpha + beta >= 1.
  LinkStrengthParams(double gamma, std::size_t alpha, std::size_t beta);

  /// gamma = alpha / (alpha + beta).
  static LinkStrengthParams balanced(std::size_t alpha, std::size_t beta);
  static LinkStrengthParams balanced(const AssociationTable& assoc) {
    return balanced(assoc.alpha(), assoc.beta());
  }
};

/// alpha / (alpha + beta). Throws NoAssociationAttributes when both are 0.
double default_gamma(std::size_t alpha, std::size_t beta);

// Row-level terms. Attributes missing on either row contribute nothing.

/// Sum over numeric attributes of exp(-|v_i - v_j|).
double numeric_affinity(const AssociationTable& assoc, std::size_t row_i, std::size_t row_j);
/// Number of categorical attributes with equal values.
double categorical_affinity(const AssociationTable& assoc, std::size_t row_i, std::size_t row_j);

// Parent-level terms; throw ParentNotCommon if `parent` is not linked to both.
double numeric_affinity(const ParentIndex& index, std::size_t parent, std::size_t i, std::size_t j);
double categorical_affinity(const ParentIndex& index, std::size_t parent, std::size_t i, std::size_t j);

/// Sum over common parents (ascending parent id) of
/// gamma * w + (1 - gamma) * z. Exactly 0 when i and j share no parent.
double link_strength(const ParentIndex& index, const LinkStrengthParams& params, std::size_t i,
                     std::size_t j);

struct ParentContribution {
  std::size_t parent;
  std::size_t row_i;
  std::size_t row_j;
  double w;
  double z;
  double total;
};

struct LinkStrengthBreakdown {
  std::size_t i;
  std::size_t j;
  double gamma;
  std::vector<ParentContribution> parents;
  double total;
};

/// Per-parent view of link_strength; `total` equals link_strength() exactly.
LinkStrengthBreakdown explain_link_strength(const ParentIndex& index,
                                            const LinkStrengthParams& params, std::size_t i,
                                            std::size_t j);

struct LinkStrengthEntry {
  EntityPair pair;
  double value;
};
using LinkStrengthTable = std::vector<LinkStrengthEntry>;

/// LS for each requested pair, evaluated with the parallel kernel.
LinkStrengthTable link_strength_table(const ParentIndex& index, const LinkStrengthParams& params,
                                      std::span<const EntityPair> pairs);

}  // namespace relml
