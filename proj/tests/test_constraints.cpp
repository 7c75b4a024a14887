#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "relml/constraints.hpp"
#include "relml/error.hpp"

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

std::set<EntityPair> as_set(const std::vector<EntityPair>& v) { return {v.begin(), v.end()}; }

std::vector<ScoredPair> pool_of(std::initializer_list<double> scores) {
  std::vector<ScoredPair> pool;
  std::size_t k = 0;
  for (double s : scores) {
    pool.push_back({EntityPair(2 * k, 2 * k + 1), s});
    ++k;
  }
  return pool;
}

PairConstraintSet numbered(std::size_t base, std::size_t count) {
  PairConstraintSet s;
  for (std::size_t k = 0; k < count; ++k) {
    s.similar.emplace_back(base + 2 * k, base + 2 * k + 1);
    s.dissimilar.emplace_back(base + 1000 + 2 * k, base + 1000 + 2 * k + 1);
  }
  return s;
}

}  // namespace

TEST(SelectByScore, HandTraceOfFourPairs) {
  const auto pool = pool_of({3, 1, 2, 0});
  const auto out = select_by_score(pool);
  EXPECT_EQ(out.similar, (std::vector<EntityPair>{pool[0].pair, pool[2].pair}));
  EXPECT_EQ(out.dissimilar, (std::vector<EntityPair>{pool[3].pair, pool[1].pair}));
  EXPECT_FALSE(out.degenerate);
  EXPECT_EQ(out.provenance, Provenance::LinkStrength);
}

TEST(SelectByScore, OddPoolDropsLeftover) {
  const auto pool = pool_of({3, 1, 2});
  const auto out = select_by_score(pool);
  EXPECT_EQ(out.similar, (std::vector<EntityPair>{pool[0].pair}));
  EXPECT_EQ(out.dissimilar, (std::vector<EntityPair>{pool[1].pair}));
}

TEST(SelectByScore, AllEqualScoresSplitByPosition) {
  const auto pool = pool_of({0, 0, 0, 0, 0, 0});
  const auto out = select_by_score(pool);
  EXPECT_TRUE(out.degenerate);
  EXPECT_EQ(as_set(out.similar), (std::set<EntityPair>{pool[0].pair, pool[1].pair, pool[2].pair}));
  EXPECT_EQ(as_set(out.dissimilar), (std::set<EntityPair>{pool[3].pair, pool[4].pair, pool[5].pair}));
}

TEST(SelectByScore, MatchesSortOracleOnRandomMultisets) {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = rng.uniform_index(101);
    const std::size_t levels = 1 + rng.uniform_index(6);
    std::vector<ScoredPair> pool;
    std::set<EntityPair> used;
    while (pool.size() < n) {
      const EntityPair p(rng.uniform_index(40), rng.uniform_index(40));
      if (p.a == p.b || !used.insert(p).second) continue;
      pool.push_back({p, static_cast<double>(rng.uniform_index(levels)) * 0.5});
    }
    const auto got = select_by_score(pool);
    const auto want = oracle::sort_select(pool);
    ASSERT_EQ(as_set(got.similar), as_set(want.similar));
    ASSERT_EQ(as_set(got.dissimilar), as_set(want.dissimilar));
    ASSERT_EQ(got.similar.size(), n / 2);
    double min_s = 1e300, max_d = -1e300;
    for (const auto& sp : pool) {
      if (as_set(got.similar).count(sp.pair)) min_s = std::min(min_s, sp.score);
      if (as_set(got.dissimilar).count(sp.pair)) max_d = std::max(max_d, sp.score);
    }
    if (n >= 2) EXPECT_GE(min_s, max_d);
  }
}

TEST(SampleDistinctPairs, DistinctNoSelfPairsDeterministic) {
  for (std::size_t n : {2u, 5u, 30u, 400u}) {
    const auto pairs = sample_distinct_pairs(n, 60, 17);
    EXPECT_EQ(pairs.size(), std::min<std::size_t>(60, n * (n - 1) / 2));
    EXPECT_EQ(as_set(pairs).size(), pairs.size());
    for (const auto& p : pairs) {
      EXPECT_LT(p.a, p.b);
      EXPECT_LT(p.b, n);
    }
    EXPECT_EQ(pairs, sample_distinct_pairs(n, 60, 17));
  }
}

TEST(LinkStrengthConstraints, SeparatesByScore) {
  Rng rng(12);
  const auto a = oracle::random_association(rng, 20, 30, 1, 1, 0.15);
  ParentIndex index(a, 30);
  const auto params = LinkStrengthParams::balanced(a);
  const auto out = select_link_strength_constraints(index, params, ConstraintBudget{101, 5});
  EXPECT_EQ(out.similar.size(), 50u);
  EXPECT_EQ(out.dissimilar.size(), 50u);
  out.validate();
  double min_s = 1e300, max_d = -1e300;
  for (const auto& p : out.similar) min_s = std::min(min_s, oracle::link_strength(a, params.gamma, p.a, p.b));
  for (const auto& p : out.dissimilar) max_d = std::max(max_d, oracle::link_strength(a, params.gamma, p.a, p.b));
  EXPECT_GE(min_s, max_d);
  const auto again = select_link_strength_constraints(index, params, ConstraintBudget{101, 5});
  EXPECT_EQ(again.similar, out.similar);
  EXPECT_EQ(again.dissimilar, out.dissimilar);
}

TEST(LinkStrengthConstraints, NoCommonParentsIsDegenerate) {
  AssociationTable a("R", "P", "C", {"x"}, {});
  const double v = 0.5;
  for (std::size_t c = 0; c < 10; ++c) a.add_row(c, c, std::span(&v, 1), {});
  ParentIndex index(a, 10);
  const auto out = select_link_strength_constraints(index, LinkStrengthParams::balanced(a), ConstraintBudget{20, 1});
  EXPECT_TRUE(out.degenerate);
  EXPECT_EQ(out.similar.size(), 10u);
}

TEST(LinkStrengthConstraints, Errors) {
  AssociationTable a("R", "P", "C", {"x"}, {});
  ParentIndex index(a, 1);
  EXPECT_EQ(code_of([&] { select_link_strength_constraints(index, LinkStrengthParams(1, 1, 0), ConstraintBudget{10, 0}); }),
            ErrorCode::NotEnoughEntities);
  ParentIndex two(a, 2);
  EXPECT_EQ(code_of([&] { select_link_strength_constraints(two, LinkStrengthParams(1, 1, 0), ConstraintBudget{1, 0}); }),
            ErrorCode::InvalidArgument);
}

TEST(LabelConstraints, ExhaustiveSmallCase) {
  const std::vector<ClassId> labels{0, 0, 1, 1};
  const auto out = label_constraints(labels, ConstraintBudget{4, 3});
  EXPECT_EQ(out.similar.size(), 2u);
  EXPECT_EQ(out.dissimilar.size(), 2u);
  for (const auto& p : out.similar) EXPECT_TRUE(p == EntityPair(0, 1) || p == EntityPair(2, 3));
  for (const auto& p : out.dissimilar) EXPECT_NE(labels[p.a], labels[p.b]);
}

TEST(LabelConstraints, SoundnessOnFiveClasses) {
  Rng rng(1);
  std::vector<ClassId> labels(100);
  for (auto& l : labels) l = static_cast<ClassId>(rng.uniform_index(5));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto out = label_constraints(labels, ConstraintBudget{200, seed});
    EXPECT_EQ(out.similar.size(), 100u);
    EXPECT_EQ(out.dissimilar.size(), 100u);
    out.validate();
    for (const auto& p : out.similar) EXPECT_EQ(labels[p.a], labels[p.b]);
    for (const auto& p : out.dissimilar) EXPECT_NE(labels[p.a], labels[p.b]);
    EXPECT_EQ(as_set(out.similar).size(), out.similar.size());
  }
}

TEST(LabelConstraints, Errors) {
  const std::vector<ClassId> same{2, 2, 2};
  EXPECT_EQ(code_of([&] { label_constraints(same, ConstraintBudget{4, 0}); }), ErrorCode::SingleClass);
  EXPECT_EQ(code_of([] { label_constraints({}, ConstraintBudget{4, 0}); }), ErrorCode::NoLabels);
}

TEST(RelativeLinkConstraints, ConnectedVersusDisconnected) {
  Rng rng(21);
  const auto a = oracle::random_association(rng, 15, 25, 1, 0, 0.1);
  ParentIndex index(a, 25);
  std::vector<std::size_t> all(25);
  for (std::size_t i = 0; i < 25; ++i) all[i] = i;
  const auto out = relative_link_constraints(index, all, ConstraintBudget{40, 2});
  EXPECT_EQ(out.provenance, Provenance::RelativeLink);
  for (const auto& p : out.similar) EXPECT_FALSE(oracle::common_parents(a, p.a, p.b).empty());
  for (const auto& p : out.dissimilar) EXPECT_TRUE(oracle::common_parents(a, p.a, p.b).empty());
}

TEST(RelativeLinkConstraints, EmptyAndCompleteGraphs) {
  AssociationTable empty("R", "P", "C", {"x"}, {});
  ParentIndex none(empty, 4);
  const std::vector<std::size_t> ids{0, 1, 2, 3};
  EXPECT_EQ(code_of([&] { relative_link_constraints(none, ids, ConstraintBudget{4, 0}); }), ErrorCode::GraphEmpty);
  AssociationTable full("R", "P", "C", {"x"}, {});
  const double v = 1.0;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t c = 0; c < 4; ++c) full.add_row(p, c, std::span(&v, 1), {});
  ParentIndex complete(full, 4);
  EXPECT_EQ(code_of([&] { relative_link_constraints(complete, ids, ConstraintBudget{4, 0}); }),
            ErrorCode::GraphComplete);
}

TEST(MixConstraints, CountsPerSide) {
  const auto lab = numbered(0, 10), ls = numbered(100, 10);
  const auto out = mix_constraints(lab, ls, 0.4, 7);
  EXPECT_EQ(out.provenance, Provenance::Mixed);
  const auto lab_s = as_set(lab.similar), ls_s = as_set(ls.similar);
  std::size_t from_lab = 0, from_ls = 0;
  for (const auto& p : out.similar) (lab_s.count(p) ? from_lab : from_ls) += 1;
  EXPECT_EQ(from_lab, 4u);
  EXPECT_EQ(from_ls, 6u);
  EXPECT_EQ(out.dissimilar.size(), 10u);
  for (double p : {0.1, 0.3, 0.7, 0.9}) {
    const auto m = mix_constraints(lab, ls, p, 1);
    std::size_t n_lab = 0;
    for (const auto& q : m.similar) n_lab += lab_s.count(q);
    EXPECT_EQ(n_lab, static_cast<std::size_t>(std::llround(p * 10)));
  }
}

TEST(MixConstraints, EndpointsReproduceSources) {
  const auto lab = numbered(0, 7), ls = numbered(100, 5);
  const auto one = mix_constraints(lab, ls, 1.0, 3);
  EXPECT_EQ(one.similar, lab.similar);
  EXPECT_EQ(one.dissimilar, lab.dissimilar);
  const auto zero = mix_constraints(lab, ls, 0.0, 3);
  EXPECT_EQ(zero.similar, ls.similar);
  EXPECT_EQ(zero.dissimilar, ls.dissimilar);
  EXPECT_EQ(code_of([&] { mix_constraints(lab, PairConstraintSet{}, 0.5, 0); }), ErrorCode::EmptySource);
  EXPECT_EQ(code_of([&] { mix_constraints(lab, ls, 1.5, 0); }), ErrorCode::InvalidArgument);
}

TEST(MixConstraints, ConflictingPairKeepsLabelAssignment) {
  PairConstraintSet lab, ls;
  lab.similar = {EntityPair(0, 1)};
  lab.dissimilar = {EntityPair(2, 3)};
  ls.similar = {EntityPair(2, 3)};
  ls.dissimilar = {EntityPair(0, 1)};
  const auto out = mix_constraints(lab, ls, 0.5, 0);
  out.validate();
  EXPECT_EQ(out.similar, (std::vector<EntityPair>{EntityPair(0, 1)}));
  EXPECT_EQ(out.dissimilar, (std::vector<EntityPair>{EntityPair(2, 3)}));
}

TEST(RelativeTriples, SharedAnchorAndFallback) {
  PairConstraintSet shared;
  shared.similar = {EntityPair(1, 2)};
  shared.dissimilar = {EntityPair(1, 3)};
  const auto t = build_relative_triples(shared);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.comparisons[0], Comparison::triple(1, 2, 3));
  EXPECT_EQ(t.triple_count(), 1u);

  PairConstraintSet apart;
  apart.similar = {EntityPair(1, 2)};
  apart.dissimilar = {EntityPair(3, 4)};
  const auto q = build_relative_triples(apart);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.comparisons[0], (Comparison{1, 2, 3, 4}));
  EXPECT_EQ(q.triple_count(), 0u);

  EXPECT_EQ(code_of([] { build_relative_triples(PairConstraintSet{}); }), ErrorCode::EmptyConstraintSet);
}

TEST(RelativeTriples, EveryComparisonComesFromSAndD) {
  const std::vector<ClassId> labels{0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2};
  const auto pairs = label_constraints(labels, ConstraintBudget{16, 4});
  const auto s = as_set(pairs.similar), d = as_set(pairs.dissimilar);
  const auto t = build_relative_triples(pairs);
  std::set<EntityPair> covered_s, covered_d;
  for (const auto& c : t.comparisons) {
    EXPECT_TRUE(s.count(EntityPair(c.i, c.j)));
    EXPECT_TRUE(d.count(EntityPair(c.k, c.l)));
    covered_s.insert(EntityPair(c.i, c.j));
    covered_d.insert(EntityPair(c.k, c.l));
  }
  EXPECT_EQ(covered_s, s);
  EXPECT_EQ(covered_d, d);
}

TEST(ConstraintExport, TextFormats) {
  RelativeTripleSet set;
  set.comparisons = {Comparison::triple(0, 1, 2), Comparison{0, 1, 2, 3}};
  std::ostringstream out;
  write_comparisons(out, set);
  EXPECT_EQ(out.str(), "0 1 2\n0 1 2 3\n");
  PairConstraintSet pairs;
  pairs.similar = {EntityPair(1, 0)};
  pairs.dissimilar = {EntityPair(0, 2)};
  const std::vector<std::string> names{"a", "b", "c"};
  std::ostringstream named;
  write_pairs(named, pairs, names);
  EXPECT_EQ(named.str(), "S a b\nD a c\n");
}

TEST(Remap, MapsPositionsToIds) {
  PairConstraintSet s;
  s.similar = {EntityPair(0, 1)};
  s.dissimilar = {EntityPair(1, 2)};
  const std::vector<std::size_t> ids{10, 5, 7};
  const auto r = remap(s, ids);
  EXPECT_EQ(r.similar[0], EntityPair(5, 10));
  EXPECT_EQ(r.dissimilar[0], EntityPair(5, 7));
}
