#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relml/link_strength.hpp"
#include "relml/pair.hpp"
#include "relml/parent_index.hpp"
#include "relml/schema.hpp"

namespace relml {

enum class Provenance { Label, RelativeLink, LinkStrength, Mixed };

const char* to_string(Provenance p);

/// Similar pairs S and dissimilar pairs D. S and D are disjoint and contain
/// no self pairs.
struct PairConstraintSet {
  std::vector<EntityPair> similar;
  std::vector<EntityPair> dissimilar;
  Provenance provenance = Provenance::Label;
  /// Set when the generator had no signal to separate S from D (for example
  /// every sampled pair had the same link strength).
  bool degenerate = false;

  bool empty() const { return similar.empty() && dissimilar.empty(); }
  std::size_t size() const { return similar.size() + dissimilar.size(); }

  /// Throws InvalidArgument if S and D overlap or a self pair is present.
  void validate() const;
};

/// d(i, j) <= d(k, l). The relative triple (i, j, k) is the case k == i,
/// stored as (i, j, i, k).
struct Comparison {
  std::size_t i, j, k, l;

  static Comparison triple(std::size_t i, std::size_t j, std::size_t k) { return {i, j, i, k}; }
  bool is_triple() const { return k == i; }
  bool operator==(const Comparison&) const = default;
};

struct RelativeTripleSet {
  std::vector<Comparison> comparisons;

  std::size_t size() const { return comparisons.size(); }
  bool empty() const { return comparisons.empty(); }
  std::size_t triple_count() const;
};

struct ConstraintBudget {
  std::size_t n_max = 300;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when n_max < 2.
  void validate() const;
};

struct ScoredPair {
  EntityPair pair;
  double score;
};

/// Selection loop over a scored pool: repeatedly move the highest-scoring
/// remaining pair to S and the lowest-scoring to D. Pairs are ranked by score
/// descending, then by pool position ascending, so argmax takes the first and
/// argmin the last pair in that order. A single leftover pair is discarded.
PairConstraintSet select_by_score(std::span<const ScoredPair> pool);

/// `count` distinct unordered pairs of positions in [0, n), no self pairs,
/// in sampling order. Returns every pair when fewer than `count` exist.
std::vector<EntityPair> sample_distinct_pairs(std::size_t n, std::size_t count, std::uint64_t seed);

/// Samples n_max pairs among `candidates`, scores each by link strength and
/// splits them with select_by_score. The pool is
/// sample_distinct_pairs(candidates.size(), n_max, derive_seed(seed, "ls-pool"))
/// mapped through `candidates`; pair ids are entries of `candidates`.
PairConstraintSet select_link_strength_constraints(const ParentIndex& index,
                                                   const LinkStrengthParams& params,
                                                   std::span<const std::size_t> candidates,
                                                   const ConstraintBudget& budget);
/// Same over every child of the index.
PairConstraintSet select_link_strength_constraints(const ParentIndex& index,
                                                   const LinkStrengthParams& params,
                                                   const ConstraintBudget& budget);

/// n_max/2 same-label pairs into S and n_max/2 different-label pairs into D.
/// Pair ids are positions in `labels`.
PairConstraintSet label_constraints(std::span<const ClassId> labels, const ConstraintBudget& budget);

/// Connected pairs (at least one common parent) into S, disconnected into D,
/// n_max/2 each. Throws GraphEmpty / GraphComplete when either kind is absent.
PairConstraintSet relative_link_constraints(const ParentIndex& index,
                                            std::span<const std::size_t> candidates,
                                            const ConstraintBudget& budget);

/// Takes ceil(p * |S_label|) similar pairs from the label set and
/// |S_ls| - ceil(p * |S_ls|) from the link-strength set (likewise for D),
/// choosing which ones with `seed` and keeping source order. p = 1 and p = 0
/// reproduce the sources exactly. A pair that would land in both S and D keeps
/// its label-set assignment.
PairConstraintSet mix_constraints(const PairConstraintSet& label_set,
                                  const PairConstraintSet& ls_set, double proportion,
                                  std::uint64_t seed);

/// Triples (i, j, k) for every S pair (i, j) and D pair (i, k) sharing the
/// anchor i. Pairs that share no anchor with any pair of the other set are
/// matched cyclically as quadruplets d(i, j) <= d(k, l).
RelativeTripleSet build_relative_triples(const PairConstraintSet& pairs);

/// Experimental: for sampled anchors i with at least one connected child,
/// requires a random disconnected child j to be farther from i than the
/// farthest connected child l (Euclidean, on `features` rows), emitted as
/// d(i, l) <= d(i, j). At most n_max comparisons.
RelativeTripleSet nearest_neighbor_graph_constraints(const ParentIndex& index,
                                                     const FeatureMatrix& features,
                                                     std::span<const std::size_t> candidates,
                                                     const ConstraintBudget& budget);

/// Maps every id through `ids` (position -> new id).
PairConstraintSet remap(const PairConstraintSet& set, std::span<const std::size_t> ids);

/// One comparison per line: "i j k" for triples, "i j k l" otherwise. When
/// `names` is given ids are written as names[id].
void write_comparisons(std::ostream& out, const RelativeTripleSet& set,
                       std::span<const std::string> names = {});
/// "S a b" / "D a b" lines.
void write_pairs(std::ostream& out, const PairConstraintSet& set,
                 std::span<const std::string> names = {});

}  // namespace relml
