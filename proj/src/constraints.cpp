#include "relml/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "relml/error.hpp"
#include "relml/kernels.hpp"
#include "relml/random.hpp"

namespace relml {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Label: return "label";
    case Provenance::RelativeLink: return "relative-link";
    case Provenance::LinkStrength: return "link-strength";
    case Provenance::Mixed: return "mixed";
  }
  return "unknown";
}

void PairConstraintSet::validate() const {
  std::unordered_set<EntityPair, EntityPairHash> s(similar.begin(), similar.end());
  for (const auto& p : similar)
    if (p.a == p.b) throw Error(ErrorCode::InvalidArgument, "self pair in S");
  for (const auto& p : dissimilar) {
    if (p.a == p.b) throw Error(ErrorCode::InvalidArgument, "self pair in D");
    if (s.count(p)) throw Error(ErrorCode::InvalidArgument, "pair appears in both S and D");
  }
}

std::size_t RelativeTripleSet::triple_count() const {
  return static_cast<std::size_t>(
      std::count_if(comparisons.begin(), comparisons.end(), [](const Comparison& c) { return c.is_triple(); }));
}

void ConstraintBudget::validate() const {
  if (n_max < 2) throw Error(ErrorCode::InvalidArgument, "constraint budget must be at least 2");
}

namespace {

std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

std::vector<EntityPair> all_pairs(std::size_t n) {
  std::vector<EntityPair> out;
  out.reserve(pair_count(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) out.emplace_back(a, b);
  return out;
}

/// Up to `count` distinct pairs of positions satisfying `accept`. Rejection
/// sampling first; if that runs dry, the remaining qualifying pairs are
/// enumerated so that scarce pair kinds are still found (or proven absent).
template <typename Accept>
std::vector<EntityPair> sample_pairs_where(std::size_t n, std::size_t count, Rng& rng,
                                           Accept&& accept) {
  std::vector<EntityPair> out;
  if (n < 2 || count == 0) return out;
  std::unordered_set<EntityPair, EntityPairHash> seen;
  const std::size_t attempts = 50 * count + 1000;
  for (std::size_t t = 0; t < attempts && out.size() < count; ++t) {
    const auto x = static_cast<std::size_t>(rng.uniform_index(n));
    const auto y = static_cast<std::size_t>(rng.uniform_index(n));
    if (x == y) continue;
    const EntityPair p(x, y);
    if (!seen.insert(p).second) continue;
    if (accept(p)) out.push_back(p);
  }
  if (out.size() < count) {
    std::unordered_set<EntityPair, EntityPairHash> chosen(out.begin(), out.end());
    std::vector<EntityPair> rest;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        const EntityPair p(a, b);
        if (!chosen.count(p) && accept(p)) rest.push_back(p);
      }
    rng.shuffle(std::span(rest));
    for (std::size_t r = 0; r < rest.size() && out.size() < count; ++r) out.push_back(rest[r]);
  }
  return out;
}

std::vector<EntityPair> to_ids(const std::vector<EntityPair>& positions,
                               std::span<const std::size_t> ids) {
  std::vector<EntityPair> out;
  out.reserve(positions.size());
  for (const auto& p : positions) out.emplace_back(ids[p.a], ids[p.b]);
  return out;
}

}  // namespace

std::vector<EntityPair> sample_distinct_pairs(std::size_t n, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t total = pair_count(n);
  if (count >= total / 2) {
    auto pairs = all_pairs(n);
    rng.shuffle(std::span(pairs));
    if (pairs.size() > count) pairs.resize(count);
    return pairs;
  }
  return sample_pairs_where(n, count, rng, [](const EntityPair&) { return true; });
}

PairConstraintSet select_by_score(std::span<const ScoredPair> pool) {
  PairConstraintSet out;
  out.provenance = Provenance::LinkStrength;
  std::vector<char> taken(pool.size(), 0);
  std::size_t remaining = pool.size();
  while (remaining >= 2) {
    std::size_t hi = pool.size();
    for (std::size_t p = 0; p < pool.size(); ++p) {
      if (taken[p]) continue;
      if (hi == pool.size() || pool[p].score > pool[hi].score) hi = p;
    }
    taken[hi] = 1;
    std::size_t lo = pool.size();
    for (std::size_t p = 0; p < pool.size(); ++p) {
      if (taken[p]) continue;
      if (lo == pool.size() || pool[p].score <= pool[lo].score) lo = p;
    }
    taken[lo] = 1;
    out.similar.push_back(pool[hi].pair);
    out.dissimilar.push_back(pool[lo].pair);
    remaining -= 2;
  }
  if (!pool.empty()) {
    const auto [mn, mx] = std::minmax_element(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
      return a.score < b.score;
    });
    out.degenerate = mn->score == mx->score;
  }
  return out;
}

PairConstraintSet select_link_strength_constraints(const ParentIndex& index,
                                                   const LinkStrengthParams& params,
                                                   std::span<const std::size_t> candidates,
                                                   const ConstraintBudget& budget) {
  budget.validate();
  if (candidates.size() < 2)
    throw Error(ErrorCode::NotEnoughEntities, "link-strength constraints need at least 2 entities");
  const auto pairs = to_ids(sample_distinct_pairs(candidates.size(), budget.n_max,
                                                  derive_seed(budget.seed, "ls-pool")),
                            candidates);
  std::vector<double> scores(pairs.size());
  kernels::omp::link_strength_batch(index, params, pairs, scores);
  std::vector<ScoredPair> pool;
  pool.reserve(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) pool.push_back({pairs[p], scores[p]});
  return select_by_score(pool);
}

PairConstraintSet select_link_strength_constraints(const ParentIndex& index,
                                                   const LinkStrengthParams& params,
                                                   const ConstraintBudget& budget) {
  std::vector<std::size_t> all(index.n_children());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return select_link_strength_constraints(index, params, all, budget);
}

PairConstraintSet label_constraints(std::span<const ClassId> labels, const ConstraintBudget& budget) {
  budget.validate();
  if (labels.empty()) throw Error(ErrorCode::NoLabels, "label constraints need labels");
  if (labels.size() < 2)
    throw Error(ErrorCode::NotEnoughEntities, "label constraints need at least 2 entities");
  if (std::all_of(labels.begin(), labels.end(), [&](ClassId c) { return c == labels[0]; }))
    throw Error(ErrorCode::SingleClass, "all entities share one class; no dissimilar pairs exist");

  const std::size_t half = budget.n_max / 2;
  PairConstraintSet out;
  out.provenance = Provenance::Label;
  Rng rs(derive_seed(budget.seed, "label-similar"));
  out.similar = sample_pairs_where(labels.size(), half, rs, [&](const EntityPair& p) {
    return labels[p.a] == labels[p.b];
  });
  Rng rd(derive_seed(budget.seed, "label-dissimilar"));
  out.dissimilar = sample_pairs_where(labels.size(), half, rd, [&](const EntityPair& p) {
    return labels[p.a] != labels[p.b];
  });
  return out;
}

PairConstraintSet relative_link_constraints(const ParentIndex& index,
                                            std::span<const std::size_t> candidates,
                                            const ConstraintBudget& budget) {
  budget.validate();
  if (candidates.size() < 2)
    throw Error(ErrorCode::NotEnoughEntities, "relative link constraints need at least 2 entities");
  const std::size_t half = budget.n_max / 2;
  auto connected = [&](const EntityPair& p) {
    return index.shares_parent(candidates[p.a], candidates[p.b]);
  };
  PairConstraintSet out;
  out.provenance = Provenance::RelativeLink;
  Rng rs(derive_seed(budget.seed, "rel-similar"));
  out.similar = to_ids(sample_pairs_where(candidates.size(), half, rs, connected), candidates);
  if (half > 0 && out.similar.empty())
    throw Error(ErrorCode::GraphEmpty, "no pair of entities shares a parent");
  Rng rd(derive_seed(budget.seed, "rel-dissimilar"));
  out.dissimilar = to_ids(sample_pairs_where(candidates.size(), half, rd,
                                             [&](const EntityPair& p) { return !connected(p); }),
                          candidates);
  if (half > 0 && out.dissimilar.empty())
    throw Error(ErrorCode::GraphComplete, "every pair of entities shares a parent");
  return out;
}

namespace {

std::vector<EntityPair> pick_in_order(const std::vector<EntityPair>& source, std::size_t count,
                                      Rng& rng) {
  std::vector<std::size_t> idx(source.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(std::span(idx));
  idx.resize(std::min(count, idx.size()));
  std::sort(idx.begin(), idx.end());
  std::vector<EntityPair> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(source[i]);
  return out;
}

std::size_t label_share(double proportion, std::size_t n) {
  // The small offset keeps products like 0.7 * 10 = 7.000000000000001 at 7.
  return static_cast<std::size_t>(std::ceil(proportion * static_cast<double>(n) - 1e-9));
}

}  // namespace

PairConstraintSet mix_constraints(const PairConstraintSet& label_set,
                                  const PairConstraintSet& ls_set, double proportion,
                                  std::uint64_t seed) {
  if (!(proportion >= 0.0 && proportion <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "proportion must lie in [0, 1]");
  if (proportion == 1.0) return label_set;
  if (proportion == 0.0) return ls_set;
  if (label_set.empty() || ls_set.empty())
    throw Error(ErrorCode::EmptySource, "mixing needs both label and link-strength constraints");

  Rng rng(derive_seed(seed, "mix"));
  const auto s_lab = pick_in_order(label_set.similar, label_share(proportion, label_set.similar.size()), rng);
  const auto d_lab = pick_in_order(label_set.dissimilar, label_share(proportion, label_set.dissimilar.size()), rng);
  const auto s_ls = pick_in_order(ls_set.similar,
                                  ls_set.similar.size() - label_share(proportion, ls_set.similar.size()), rng);
  const auto d_ls = pick_in_order(
      ls_set.dissimilar, ls_set.dissimilar.size() - label_share(proportion, ls_set.dissimilar.size()), rng);

  PairConstraintSet out;
  out.provenance = Provenance::Mixed;
  std::unordered_set<EntityPair, EntityPairHash> in_s, in_d;
  for (const auto& p : s_lab)
    if (in_s.insert(p).second) out.similar.push_back(p);
  for (const auto& p : d_lab)
    if (!in_s.count(p) && in_d.insert(p).second) out.dissimilar.push_back(p);
  for (const auto& p : s_ls)
    if (!in_d.count(p) && in_s.insert(p).second) out.similar.push_back(p);
  for (const auto& p : d_ls)
    if (!in_s.count(p) && in_d.insert(p).second) out.dissimilar.push_back(p);
  return out;
}

RelativeTripleSet build_relative_triples(const PairConstraintSet& pairs) {
  if (pairs.similar.empty() || pairs.dissimilar.empty())
    throw Error(ErrorCode::EmptyConstraintSet, "relative comparisons need both S and D pairs");
  const auto& S = pairs.similar;
  const auto& D = pairs.dissimilar;
  std::unordered_map<std::size_t, std::vector<std::size_t>> d_by_anchor;
  for (std::size_t d = 0; d < D.size(); ++d) {
    d_by_anchor[D[d].a].push_back(d);
    d_by_anchor[D[d].b].push_back(d);
  }

  RelativeTripleSet out;
  std::vector<char> s_used(S.size(), 0), d_used(D.size(), 0);
  for (std::size_t s = 0; s < S.size(); ++s) {
    for (std::size_t anchor : {S[s].a, S[s].b}) {
      auto it = d_by_anchor.find(anchor);
      if (it == d_by_anchor.end()) continue;
      for (std::size_t d : it->second) {
        out.comparisons.push_back(Comparison::triple(anchor, S[s].other(anchor), D[d].other(anchor)));
        s_used[s] = d_used[d] = 1;
      }
    }
  }

  std::vector<std::size_t> s_free, d_free;
  for (std::size_t s = 0; s < S.size(); ++s)
    if (!s_used[s]) s_free.push_back(s);
  for (std::size_t d = 0; d < D.size(); ++d)
    if (!d_used[d]) d_free.push_back(d);
  auto quad = [&](std::size_t s, std::size_t d) {
    out.comparisons.push_back({S[s].a, S[s].b, D[d].a, D[d].b});
  };
  if (!s_free.empty() && !d_free.empty()) {
    const std::size_t rounds = std::max(s_free.size(), d_free.size());
    for (std::size_t t = 0; t < rounds; ++t) quad(s_free[t % s_free.size()], d_free[t % d_free.size()]);
  } else if (!s_free.empty()) {
    for (std::size_t t = 0; t < s_free.size(); ++t) quad(s_free[t], t % D.size());
  } else if (!d_free.empty()) {
    for (std::size_t t = 0; t < d_free.size(); ++t) quad(t % S.size(), d_free[t]);
  }
  return out;
}

RelativeTripleSet nearest_neighbor_graph_constraints(const ParentIndex& index,
                                                     const FeatureMatrix& features,
                                                     std::span<const std::size_t> candidates,
                                                     const ConstraintBudget& budget) {
  budget.validate();
  if (candidates.size() < 3)
    throw Error(ErrorCode::NotEnoughEntities, "nearest-neighbour constraints need at least 3 entities");
  Rng rng(derive_seed(budget.seed, "nn-graph"));
  std::vector<std::size_t> anchors(candidates.begin(), candidates.end());
  rng.shuffle(std::span(anchors));

  RelativeTripleSet out;
  for (std::size_t i : anchors) {
    if (out.size() >= budget.n_max) break;
    std::size_t farthest = 0;
    double far_dist = -1.0;
    std::vector<std::size_t> disconnected;
    for (std::size_t j : candidates) {
      if (j == i) continue;
      if (index.shares_parent(i, j)) {
        const double dist = (features.row(static_cast<Eigen::Index>(i)) -
                             features.row(static_cast<Eigen::Index>(j))).squaredNorm();
        if (dist > far_dist) {
          far_dist = dist;
          farthest = j;
        }
      } else {
        disconnected.push_back(j);
      }
    }
    if (far_dist < 0.0 || disconnected.empty()) continue;
    const std::size_t j = disconnected[static_cast<std::size_t>(rng.uniform_index(disconnected.size()))];
    out.comparisons.push_back(Comparison::triple(i, farthest, j));
  }
  return out;
}

PairConstraintSet remap(const PairConstraintSet& set, std::span<const std::size_t> ids) {
  PairConstraintSet out = set;
  out.similar = to_ids(set.similar, ids);
  out.dissimilar = to_ids(set.dissimilar, ids);
  return out;
}

namespace {

void write_id(std::ostream& out, std::size_t id, std::span<const std::string> names) {
  if (names.empty()) out << id;
  else out << names[id];
}

}  // namespace

void write_comparisons(std::ostream& out, const RelativeTripleSet& set,
                       std::span<const std::string> names) {
  for (const auto& c : set.comparisons) {
    write_id(out, c.i, names);
    out << ' ';
    write_id(out, c.j, names);
    if (c.is_triple()) {
      out << ' ';
      write_id(out, c.l, names);
    } else {
      out << ' ';
      write_id(out, c.k, names);
      out << ' ';
      write_id(out, c.l, names);
    }
    out << '\n';
  }
}

void write_pairs(std::ostream& out, const PairConstraintSet& set, std::span<const std::string> names) {
  for (const auto& p : set.similar) {
    out << "S ";
    write_id(out, p.a, names);
    out << ' ';
    write_id(out, p.b, names);
    out << '\n';
  }
  for (const auto& p : set.dissimilar) {
    out << "D ";
    write_id(out, p.a, names);
    out << ' ';
    write_id(out, p.b, names);
    out << '\n';
  }
}

}  // namespace relml
