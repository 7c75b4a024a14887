#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "relml/error.hpp"
#include "relml/evaluation.hpp"
#include "relml/kernels.hpp"
#include "relml/knn.hpp"
#include "relml/random.hpp"
#include "relml/synthetic.hpp"

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

RelationalSchema small_schema(double rho = 0.8) {
  SyntheticConfig c;
  c.n_children = 150;
  c.n_parents = 40;
  c.links_per_parent = 30;
  c.correlation = rho;
  return generate_synthetic(c);
}

EvalConfig small_config() {
  EvalConfig c;
  c.budgets = {20, 40};
  c.seed = 3;
  return c;
}

FeatureMatrix random_points(Rng& rng, Eigen::Index n, Eigen::Index d) {
  FeatureMatrix f(n, d);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < d; ++c) f(r, c) = rng.normal();
  return f;
}

std::vector<double> accuracies(const ExperimentResult& r) {
  std::vector<double> out;
  for (const auto& run : r.runs) out.push_back(run.accuracy);
  return out;
}

}  // namespace

TEST(Knn, Examples) {
  FeatureMatrix train(3, 1);
  train << 0.0, 1.0, 5.0;
  const std::vector<ClassId> labels{0, 0, 1};
  const auto id = MahalanobisMetric::identity(1);
  const double q5 = 5.0, q0 = 0.2;
  EXPECT_EQ(knn_predict(id, train, labels, std::span(&q5, 1), 1), 1);
  EXPECT_EQ(knn_predict(id, train, labels, std::span(&q5, 1), 3), 0);
  EXPECT_EQ(knn_predict(id, train, labels, std::span(&q0, 1), 3), 0);
  EXPECT_EQ(code_of([&] { knn_predict(id, train, labels, std::span(&q0, 1), 4); }),
            ErrorCode::TooFewTrainingPoints);
  const std::vector<ClassId> two{1, 0};
  // Vote ties go to the smaller class id.
  EXPECT_EQ(knn_predict(id, train.topRows(2), two, std::span(&q0, 1), 2), 0);
  // Distance ties go to the smaller training index.
  FeatureMatrix sym(2, 1);
  sym << -1.0, 1.0;
  const double zero = 0.0;
  EXPECT_EQ(knn_predict(id, sym, std::vector<ClassId>{3, 2}, std::span(&zero, 1), 1), 3);
}

TEST(Knn, MatchesBruteForceOracles) {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto train = random_points(rng, 20, 3);
    std::vector<ClassId> labels(20);
    for (auto& l : labels) l = static_cast<ClassId>(rng.uniform_index(3));
    Eigen::MatrixXd a = random_points(rng, 2, 3);
    const MahalanobisMetric m(a.transpose() * a);
    const Eigen::MatrixXd l = linear_projection(m);
    const auto queries = random_points(rng, 10, 3);
    const auto batch = knn_predict_batch(m, train, labels, queries, 5);
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
      const Eigen::VectorXd x = queries.row(q).transpose();
      const int euclid = oracle::knn(20, labels, 5, [&](std::size_t t) {
        return (train.row(static_cast<Eigen::Index>(t)).transpose() - x).squaredNorm();
      });
      EXPECT_EQ(knn_predict(MahalanobisMetric::identity(3), train, labels, row_span(queries, static_cast<std::size_t>(q)), 5), euclid);
      const int projected = oracle::knn(20, labels, 5, [&](std::size_t t) {
        return (l * (train.row(static_cast<Eigen::Index>(t)).transpose() - x)).squaredNorm();
      });
      EXPECT_EQ(batch[static_cast<std::size_t>(q)], projected);
    }
  }
}

TEST(Knn, AccuracyFraction) {
  const std::vector<ClassId> p{0, 1, 1, 2}, t{0, 1, 2, 2};
  EXPECT_EQ(accuracy(p, t), 0.75);
  EXPECT_EQ(accuracy({}, {}), 0.0);
}

TEST(Folds, PartitionIsShuffledAndBalanced) {
  const auto folds = make_folds(100, 3, 5);
  ASSERT_EQ(folds.size(), 3u);
  std::set<std::size_t> all;
  for (const auto& f : folds) {
    EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
    EXPECT_GE(f.size(), 33u);
    EXPECT_LE(f.size(), 34u);
    all.insert(f.begin(), f.end());
  }
  EXPECT_EQ(all.size(), 100u);
  EXPECT_NE(folds[0], std::vector<std::size_t>(all.begin(), std::next(all.begin(), 34)));
  EXPECT_EQ(make_folds(100, 3, 5), folds);
  EXPECT_EQ(code_of([] { make_folds(2, 3, 0); }), ErrorCode::FoldTooSmall);
}

TEST(Evaluation, FormatProportion) {
  EXPECT_EQ(format_proportion(1.0), "1.0");
  EXPECT_EQ(format_proportion(0.8), "0.8");
  EXPECT_EQ(format_proportion(0.0), "0.0");
  EXPECT_EQ(format_proportion(0.25), "0.25");
}

TEST(Evaluation, ParseNames) {
  EXPECT_EQ(parse_condition("LS"), Condition::Pro);
  EXPECT_EQ(parse_condition("Both"), Condition::Both);
  EXPECT_EQ(parse_learner("LSML"), Learner::Lsml);
  EXPECT_EQ(code_of([] { parse_condition("xyz"); }), ErrorCode::InvalidArgument);
}

TEST(Evaluation, EuclideanEqualsIdentityKnnOracle) {
  const auto schema = small_schema();
  const auto config = small_config();
  const auto r = cross_validate(schema, Condition::Euc, Learner::Itml, config);
  ASSERT_EQ(r.runs.size(), config.folds * config.budgets.size());
  const auto& target = schema.child_table();
  const auto& x = target.features();
  const auto& labels = target.labels();
  const auto folds = make_folds(target.size(), config.folds, derive_seed(config.seed, "folds"));
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < folds.size(); ++g)
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    std::sort(train.begin(), train.end());
    std::vector<int> train_y;
    for (std::size_t id : train) train_y.push_back(labels[id]);
    std::size_t correct = 0;
    for (std::size_t q : folds[f]) {
      const int got = oracle::knn(train.size(), train_y, 5, [&](std::size_t t) {
        return (x.row(static_cast<Eigen::Index>(train[t])) - x.row(static_cast<Eigen::Index>(q))).squaredNorm();
      });
      correct += got == labels[q];
    }
    const double want = 100.0 * static_cast<double>(correct) / static_cast<double>(folds[f].size());
    for (const auto& run : r.runs)
      if (run.fold == f) {
        EXPECT_NEAR(run.accuracy, want, 1e-9);
        EXPECT_EQ(run.iterations, 0u);
      }
  }
}

TEST(Evaluation, ResultsAreRecomputable) {
  const auto schema = small_schema();
  const auto config = small_config();
  const auto rows = run_conditions(schema, {Condition::Euc, Condition::Lab, Condition::Pro}, Learner::Itml, config);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    const auto [mean, sd] = summarize(r.runs);
    EXPECT_EQ(r.accuracy_mean, mean);
    EXPECT_EQ(r.accuracy_std, sd);
    double sum = 0.0;
    for (const auto& run : r.runs) {
      EXPECT_GE(run.accuracy, 0.0);
      EXPECT_LE(run.accuracy, 100.0);
      sum += run.accuracy;
    }
    EXPECT_NEAR(sum / static_cast<double>(r.runs.size()), r.accuracy_mean, 1e-12);
    const auto pf = r.per_fold(config.folds);
    const auto pb = r.per_budget(config.budgets);
    EXPECT_NEAR((pf[0] + pf[1] + pf[2]) / 3.0, r.accuracy_mean, 1e-9);
    EXPECT_NEAR((pb[0] + pb[1]) / 2.0, r.accuracy_mean, 1e-9);
  }
  EXPECT_EQ(rows[0].label, "Euc");
  EXPECT_EQ(rows[1].label, "Lab");
  EXPECT_EQ(rows[2].label, "Pro");
  for (const auto& run : rows[1].runs) {
    EXPECT_EQ(run.similar + run.dissimilar, run.budget);
    EXPECT_FALSE(run.degenerate);
  }
}

TEST(Evaluation, EmptyAssociationMakesProDegenerateAndEuclidean) {
  auto schema = small_schema();
  schema.association = AssociationTable("Link", "Parent", "Child", {"value0"}, {"kind0"});
  const auto config = small_config();
  const auto pro = cross_validate(schema, Condition::Pro, Learner::Itml, config);
  const auto euc = cross_validate(schema, Condition::Euc, Learner::Itml, config);
  EXPECT_EQ(pro.degenerate_runs(), pro.runs.size());
  EXPECT_EQ(accuracies(pro), accuracies(euc));
  const auto rel = cross_validate(schema, Condition::Rel, Learner::Itml, config);
  EXPECT_EQ(rel.degenerate_runs(), rel.runs.size());
  EXPECT_EQ(accuracies(rel), accuracies(euc));
}

TEST(Evaluation, SweepEndpointsMatchConditions) {
  const auto schema = small_schema();
  const auto config = small_config();
  for (Learner learner : {Learner::Itml, Learner::Lsml}) {
    const auto sweep = proportion_sweep(schema, learner, default_proportions(), config);
    ASSERT_EQ(sweep.size(), 6u);
    EXPECT_EQ(sweep.front().label, "1.0");
    EXPECT_EQ(sweep.back().label, "0.0");
    const auto lab = cross_validate(schema, Condition::Lab, learner, config);
    const auto pro = cross_validate(schema, Condition::Pro, learner, config);
    EXPECT_EQ(accuracies(sweep.front()), accuracies(lab));
    EXPECT_EQ(accuracies(sweep.back()), accuracies(pro));
    EXPECT_NEAR(sweep.front().accuracy_mean, lab.accuracy_mean, 1e-9);
    EXPECT_NEAR(sweep.back().accuracy_mean, pro.accuracy_mean, 1e-9);
  }
}

TEST(Evaluation, BothIsBestSweepRow) {
  const auto schema = small_schema();
  auto config = small_config();
  config.both_proportions = {1.0, 0.5, 0.0};
  const auto both = cross_validate(schema, Condition::Both, Learner::Itml, config);
  const auto sweep = proportion_sweep(schema, Learner::Itml, config.both_proportions, config);
  double best = -1.0;
  for (const auto& r : sweep) best = std::max(best, r.accuracy_mean);
  EXPECT_EQ(both.accuracy_mean, best);
  EXPECT_EQ(both.label, "Both");
  ASSERT_TRUE(both.proportion.has_value());
}

TEST(Evaluation, NoHeldOutEntityIsRead) {
  const auto schema = small_schema();
  auto config = small_config();
  AccessAudit audit;
  config.audit = &audit;
  run_conditions(schema, {Condition::Lab, Condition::Rel, Condition::Pro, Condition::Both}, Learner::Itml, config);
  EXPECT_EQ(audit.folds(), 3u);
  EXPECT_EQ(audit.violations(), 0u);
  for (std::size_t f = 0; f < 3; ++f) EXPECT_GT(audit.recorder(f).touched_ids().size(), 0u);
}

TEST(AccessAudit, DetectsReadsOfHeldOutIds) {
  AccessAudit audit;
  audit.reset(10, 2);
  const std::vector<std::size_t> held{1, 2};
  audit.set_held_out(0, held);
  audit.recorder(0).record(3);
  EXPECT_EQ(audit.violations(), 0u);
  audit.recorder(0).record(2);
  EXPECT_EQ(audit.violations(), 1u);
  EXPECT_EQ(audit.violations(0), 1u);
}

TEST(Evaluation, DeterministicAcrossThreadCounts) {
  const auto schema = small_schema();
  const auto config = small_config();
  const int saved = kernels::max_threads();
  kernels::set_threads(1);
  const auto a = run_conditions(schema, {Condition::Lab, Condition::Pro}, Learner::Lsml, config);
  kernels::set_threads(4);
  const auto b = run_conditions(schema, {Condition::Lab, Condition::Pro}, Learner::Lsml, config);
  kernels::set_threads(saved);
  for (std::size_t r = 0; r < a.size(); ++r) {
    EXPECT_EQ(accuracies(a[r]), accuracies(b[r]));
    for (std::size_t k = 0; k < a[r].runs.size(); ++k) EXPECT_EQ(a[r].runs[k].seed, b[r].runs[k].seed);
  }
}

TEST(Evaluation, Errors) {
  auto config = small_config();
  SyntheticConfig tiny;
  tiny.n_children = 6;
  tiny.n_parents = 3;
  tiny.links_per_parent = 3;
  tiny.n_classes = 2;
  EXPECT_EQ(code_of([&] { cross_validate(generate_synthetic(tiny), Condition::Euc, Learner::Itml, config); }),
            ErrorCode::FoldTooSmall);

  const auto schema = small_schema();
  const auto unlabeled = schema.oriented_toward("Parent");
  EXPECT_EQ(code_of([&] { cross_validate(unlabeled, Condition::Euc, Learner::Itml, config); }), ErrorCode::NoLabels);

  config.folds = 1;
  EXPECT_EQ(code_of([&] { cross_validate(schema, Condition::Euc, Learner::Itml, config); }), ErrorCode::InvalidArgument);
}
