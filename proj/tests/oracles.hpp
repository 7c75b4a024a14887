#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They scan raw rows and sort where the library merges and loops, so
// agreement is evidence rather than repetition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "relml/constraints.hpp"
#include "relml/random.hpp"
#include "relml/schema.hpp"

namespace oracle {

using relml::AssociationTable;
using relml::EntityPair;

/// First association row linking parent -> child, scanning in row order.
inline std::optional<std::size_t> find_row(const AssociationTable& a, std::size_t parent, std::size_t child) {
  for (std::size_t r = 0; r < a.size(); ++r)
    if (a.parent(r) == parent && a.child(r) == child) return r;
  return std::nullopt;
}

inline std::set<std::size_t> parents_of(const AssociationTable& a, std::size_t child) {
  std::set<std::size_t> out;
  for (std::size_t r = 0; r < a.size(); ++r)
    if (a.child(r) == child) out.insert(a.parent(r));
  return out;
}

/// Nested-loop intersection over all pairs of rows.
inline std::vector<std::size_t> common_parents(const AssociationTable& a, std::size_t i, std::size_t j) {
  std::set<std::size_t> out;
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t s = 0; s < a.size(); ++s)
      if (a.child(r) == i && a.child(s) == j && a.parent(r) == a.parent(s)) out.insert(a.parent(r));
  return {out.begin(), out.end()};
}

/// Sum over common parents (ascending id) of gamma * w + (1 - gamma) * z,
/// evaluated term by term from the raw rows.
inline double link_strength(const AssociationTable& a, double gamma, std::size_t i, std::size_t j) {
  double total = 0.0;
  for (std::size_t p : common_parents(a, i, j)) {
    const std::size_t ri = *find_row(a, p, i);
    const std::size_t rj = *find_row(a, p, j);
    double w = 0.0;
    for (std::size_t m = 0; m < a.alpha(); ++m) {
      const double x = a.numeric(ri, m), y = a.numeric(rj, m);
      if (std::isnan(x) || std::isnan(y)) continue;
      w += std::exp(-std::fabs(x - y));
    }
    double z = 0.0;
    for (std::size_t m = 0; m < a.beta(); ++m) {
      const auto x = a.category(ri, m), y = a.category(rj, m);
      if (x < 0 || y < 0) continue;
      if (x == y) z += 1.0;
    }
    total += gamma * w + (1.0 - gamma) * z;
  }
  return total;
}

/// Sort-based selection: order by score descending then pool position
/// ascending; first half to S, last half to D, middle element dropped.
inline relml::PairConstraintSet sort_select(const std::vector<relml::ScoredPair>& pool) {
  std::vector<std::size_t> order(pool.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return pool[x].score > pool[y].score; });
  const std::size_t half = pool.size() / 2;
  relml::PairConstraintSet out;
  for (std::size_t k = 0; k < half; ++k) out.similar.push_back(pool[order[k]].pair);
  for (std::size_t k = pool.size() - half; k < pool.size(); ++k) out.dissimilar.push_back(pool[order[k]].pair);
  return out;
}

/// k-NN by computing every distance and sorting (distance, index) tuples.
template <typename Distance>
int knn(std::size_t n_train, const std::vector<int>& labels, std::size_t k, Distance&& distance) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t t = 0; t < n_train; ++t) d.emplace_back(distance(t), t);
  std::sort(d.begin(), d.end());
  std::map<int, int> votes;
  for (std::size_t r = 0; r < k; ++r) ++votes[labels[d[r].second]];
  int best = votes.begin()->first, count = -1;
  for (const auto& [label, c] : votes)
    if (c > count) {
      best = label;
      count = c;
    }
  return best;
}

/// Random association table over [0, n_parents) x [0, n_children) with
/// values already in [0, 1]; `missing` is the chance a value is absent.
inline AssociationTable random_association(relml::Rng& rng, std::size_t n_parents, std::size_t n_children,
                                           std::size_t alpha, std::size_t beta, double density,
                                           double missing = 0.0) {
  std::vector<std::string> num, cat;
  for (std::size_t m = 0; m < alpha; ++m) num.push_back("v" + std::to_string(m));
  for (std::size_t m = 0; m < beta; ++m) cat.push_back("c" + std::to_string(m));
  AssociationTable a("A", "P", "C", num, cat);
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (std::size_t p = 0; p < n_parents; ++p)
    for (std::size_t c = 0; c < n_children; ++c)
      if (rng.bernoulli(density)) links.emplace_back(p, c);
  rng.shuffle(std::span(links));
  std::vector<double> nv(alpha);
  std::vector<std::string> cv(beta);
  for (const auto& [p, c] : links) {
    for (auto& v : nv)
      v = rng.bernoulli(missing) ? std::numeric_limits<double>::quiet_NaN()
                                 : static_cast<double>(rng.uniform_index(5)) / 4.0;
    for (auto& v : cv) v = rng.bernoulli(missing) ? std::string() : std::string(1, static_cast<char>('a' + rng.uniform_index(3)));
    a.add_row(p, c, nv, cv);
  }
  return a;
}

}  // namespace oracle
