#include <benchmark/benchmark.h>

#include "relml/constraints.hpp"
#include "relml/kernels.hpp"
#include "relml/random.hpp"
#include "relml/synthetic.hpp"

#include <map>
#include <memory>

namespace {

using namespace relml;

struct Fixture {
  RelationalSchema schema;
  ParentIndex index;
  LinkStrengthParams params;
  std::vector<EntityPair> pairs;
  FeatureMatrix train, queries;
  std::vector<ClassId> labels;
  Eigen::MatrixXd metric;

  explicit Fixture(std::size_t children)
      : schema(generate_synthetic([&] {
          SyntheticConfig c;
          c.n_children = children;
          c.n_parents = children / 3;
          return c;
        }())),
        index(schema.association, schema.child_table().size()),
        params(LinkStrengthParams::balanced(schema.association)),
        pairs(sample_distinct_pairs(children, 20000, 7)) {
    const auto& x = schema.child_table().features();
    const auto half = x.rows() / 2;
    train = x.topRows(half);
    queries = x.bottomRows(x.rows() - half);
    const auto& all = schema.child_table().labels();
    labels.assign(all.begin(), all.begin() + half);
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(x.cols(), x.cols());
    metric = a.transpose() * a;
  }
};

Fixture& fixture(std::size_t children) {
  static std::map<std::size_t, std::unique_ptr<Fixture>> cache;
  auto& f = cache[children];
  if (!f) f = std::make_unique<Fixture>(children);
  return *f;
}

template <bool Parallel>
void link_strength(benchmark::State& state) {
  auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.pairs.size());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::link_strength_batch(f.index, f.params, f.pairs, out);
    else kernels::serial::link_strength_batch(f.index, f.params, f.pairs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.pairs.size()));
}

template <bool Parallel>
void distances(benchmark::State& state) {
  auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  const auto& x = f.schema.child_table().features();
  std::vector<double> out(f.pairs.size());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::squared_distances(f.metric, x, f.pairs, out);
    else kernels::serial::squared_distances(f.metric, x, f.pairs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.pairs.size()));
}

template <bool Parallel>
void knn(benchmark::State& state) {
  auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto out = Parallel ? kernels::omp::knn_predict_batch(f.metric, f.train, f.labels, f.queries, 5)
                        : kernels::serial::knn_predict_batch(f.metric, f.train, f.labels, f.queries, 5);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.queries.rows()));
}

BENCHMARK(link_strength<false>)->Name("link_strength/serial")->Arg(600)->Arg(2000);
BENCHMARK(link_strength<true>)->Name("link_strength/omp")->Arg(600)->Arg(2000);
BENCHMARK(distances<false>)->Name("squared_distances/serial")->Arg(600)->Arg(2000);
BENCHMARK(distances<true>)->Name("squared_distances/omp")->Arg(600)->Arg(2000);
BENCHMARK(knn<false>)->Name("knn/serial")->Arg(600)->Arg(2000);
BENCHMARK(knn<true>)->Name("knn/omp")->Arg(600)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
