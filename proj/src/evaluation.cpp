#include "relml/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <memory>

#include "relml/constraints.hpp"
#include "relml/error.hpp"
#include "relml/knn.hpp"
#include "relml/link_strength.hpp"
#include "relml/log.hpp"
#include "relml/parent_index.hpp"
#include "relml/random.hpp"

namespace relml {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::Euc: return "Euc";
    case Condition::Lab: return "Lab";
    case Condition::Rel: return "Rel";
    case Condition::Pro: return "Pro";
    case Condition::Both: return "Both";
  }
  return "unknown";
}

const char* to_string(Learner l) { return l == Learner::Itml ? "itml" : "lsml"; }

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

Condition parse_condition(std::string_view text) {
  const auto t = lower(text);
  if (t == "euc") return Condition::Euc;
  if (t == "lab") return Condition::Lab;
  if (t == "rel") return Condition::Rel;
  if (t == "ls" || t == "pro") return Condition::Pro;
  if (t == "both") return Condition::Both;
  throw Error(ErrorCode::InvalidArgument, "unknown condition '" + std::string(text) + "'");
}

Learner parse_learner(std::string_view text) {
  const auto t = lower(text);
  if (t == "itml") return Learner::Itml;
  if (t == "lsml") return Learner::Lsml;
  throw Error(ErrorCode::InvalidArgument, "unknown learner '" + std::string(text) + "'");
}

void EvalConfig::validate() const {
  if (k_neighbors < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
  if (budgets.empty()) throw Error(ErrorCode::InvalidArgument, "no constraint budgets given");
  for (std::size_t b : budgets)
    if (b < 2) throw Error(ErrorCode::InvalidArgument, "constraint budgets must be at least 2");
  for (double p : both_proportions)
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "proportions must lie in [0, 1]");
  if (threshold_sample < 1) throw Error(ErrorCode::InvalidArgument, "threshold sample must be positive");
  if (gamma && !(*gamma >= 0.0 && *gamma <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0, 1]");
  lsml.validate();
}

std::vector<double> ExperimentResult::per_fold(std::size_t folds) const {
  std::vector<double> sum(folds, 0.0);
  std::vector<std::size_t> count(folds, 0);
  for (const auto& r : runs) {
    if (r.fold >= folds) continue;
    sum[r.fold] += r.accuracy;
    ++count[r.fold];
  }
  for (std::size_t f = 0; f < folds; ++f)
    if (count[f]) sum[f] /= static_cast<double>(count[f]);
  return sum;
}

std::vector<double> ExperimentResult::per_budget(const std::vector<std::size_t>& budgets) const {
  std::vector<double> out;
  for (std::size_t b : budgets) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : runs)
      if (r.budget == b) {
        sum += r.accuracy;
        ++count;
      }
    out.push_back(count ? sum / static_cast<double>(count) : 0.0);
  }
  return out;
}

std::size_t ExperimentResult::degenerate_runs() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunScore& r) { return r.degenerate; }));
}

std::string format_proportion(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", p);
  std::string s(buf);
  while (s.size() > 3 && s.back() == '0') s.pop_back();
  return s;
}

std::pair<double, double> summarize(const std::vector<RunScore>& runs) {
  if (runs.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (const auto& r : runs) sum += r.accuracy;
  const double mean = sum / static_cast<double>(runs.size());
  double var = 0.0;
  for (const auto& r : runs) var += (r.accuracy - mean) * (r.accuracy - mean);
  return {mean, std::sqrt(var / static_cast<double>(runs.size()))};
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
  if (n < folds)
    throw Error(ErrorCode::FoldTooSmall,
                std::to_string(n) + " entities cannot fill " + std::to_string(folds) + " folds");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(order));
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t start = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = n / folds + (f < n % folds ? 1 : 0);
    out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                  order.begin() + static_cast<std::ptrdiff_t>(start + size));
    std::sort(out[f].begin(), out[f].end());
    start += size;
  }
  return out;
}

namespace {

constexpr std::size_t kNotTraining = std::numeric_limits<std::size_t>::max();

FeatureMatrix gather_rows(const FeatureMatrix& x, const std::vector<std::size_t>& ids) {
  FeatureMatrix out(static_cast<Eigen::Index>(ids.size()), x.cols());
  for (std::size_t r = 0; r < ids.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(ids[r]));
  return out;
}

struct FoldData {
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;
  std::vector<std::size_t> local_of;  ///< global id -> training position
  FeatureMatrix train_x, test_x;
  std::vector<ClassId> train_y, test_y;
  std::unique_ptr<ParentIndex> index;
  Thresholds thresholds{};
};

/// A row of an experiment: a condition, or a label/link-strength mix.
struct Plan {
  Condition condition;
  std::optional<double> proportion;
};

/// Per-experiment state shared read-only by all runs.
class Context {
 public:
  Context(const RelationalSchema& schema, const EvalConfig& config)
      : config_(config),
        assoc_(normalize_association_numerics(schema.association)),
        params_(LinkStrengthParams::balanced(assoc_.alpha(), assoc_.beta())) {
    config.validate();
    if (config.gamma) params_ = LinkStrengthParams(*config.gamma, assoc_.alpha(), assoc_.beta());
    const auto& target = schema.child_table();
    const auto& labels = target.labels();
    const std::size_t n = target.size();
    const auto splits = make_folds(n, config.folds, derive_seed(config.seed, "folds"));
    if (config.audit) config.audit->reset(n, config.folds);

    folds_.resize(config.folds);
    for (std::size_t f = 0; f < config.folds; ++f) {
      auto& fd = folds_[f];
      fd.test_ids = splits[f];
      for (std::size_t g = 0; g < config.folds; ++g)
        if (g != f) fd.train_ids.insert(fd.train_ids.end(), splits[g].begin(), splits[g].end());
      std::sort(fd.train_ids.begin(), fd.train_ids.end());
      if (fd.train_ids.size() < config.k_neighbors)
        throw Error(ErrorCode::FoldTooSmall, "fold " + std::to_string(f) + " has " +
                                                 std::to_string(fd.train_ids.size()) +
                                                 " training points for k = " +
                                                 std::to_string(config.k_neighbors));
      AccessRecorder* recorder = nullptr;
      if (config.audit) {
        config.audit->set_held_out(f, fd.test_ids);
        recorder = &config.audit->recorder(f);
        for (std::size_t id : fd.train_ids) recorder->record(id);
      }
      fd.local_of.assign(n, kNotTraining);
      for (std::size_t r = 0; r < fd.train_ids.size(); ++r) fd.local_of[fd.train_ids[r]] = r;
      fd.train_x = gather_rows(target.features(), fd.train_ids);
      fd.test_x = gather_rows(target.features(), fd.test_ids);
      for (std::size_t id : fd.train_ids) fd.train_y.push_back(labels[id]);
      for (std::size_t id : fd.test_ids) fd.test_y.push_back(labels[id]);
      fd.index = std::make_unique<ParentIndex>(assoc_, n, fd.train_ids, recorder);
      fd.thresholds = estimate_thresholds(fd.train_x, config.threshold_sample,
                                          derive_seed(derive_seed(config.seed, "thresholds"), f));
    }
  }

  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  const EvalConfig& config() const { return config_; }
  std::size_t folds() const { return folds_.size(); }

  RunScore run(const Plan& plan, Learner learner, std::size_t f, std::size_t budget) const;

 private:
  PairConstraintSet constraints(const Plan& plan, const FoldData& fd, std::size_t budget,
                                std::uint64_t seed, bool& degenerate) const;

  const EvalConfig& config_;
  AssociationTable assoc_;
  LinkStrengthParams params_;
  std::vector<FoldData> folds_;
};

PairConstraintSet Context::constraints(const Plan& plan, const FoldData& fd, std::size_t budget,
                                       std::uint64_t seed, bool& degenerate) const {
  auto labels = [&] {
    return label_constraints(fd.train_y, {budget, derive_seed(seed, "label")});
  };
  auto link_strength = [&] {
    auto set = select_link_strength_constraints(*fd.index, params_, fd.train_ids,
                                                {budget, derive_seed(seed, "ls")});
    return remap(set, fd.local_of);
  };

  if (plan.proportion) {
    const double p = *plan.proportion;
    if (p == 1.0) return labels();
    auto ls = link_strength();
    if (p == 0.0) {
      degenerate = ls.degenerate;
      return ls;
    }
    return mix_constraints(labels(), ls, p, derive_seed(seed, "mix"));
  }
  switch (plan.condition) {
    case Condition::Lab:
      return labels();
    case Condition::Pro: {
      auto ls = link_strength();
      degenerate = ls.degenerate;
      return ls;
    }
    case Condition::Rel:
      try {
        auto rel = relative_link_constraints(*fd.index, fd.train_ids, {budget, derive_seed(seed, "rel")});
        return remap(rel, fd.local_of);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::GraphEmpty && e.code() != ErrorCode::GraphComplete) throw;
        degenerate = true;
        return {};
      }
    default:
      return {};
  }
}

RunScore Context::run(const Plan& plan, Learner learner, std::size_t f, std::size_t budget) const {
  const auto& fd = folds_[f];
  const std::uint64_t seed = derive_seed(derive_seed(derive_seed(config_.seed, "run"), f), budget);
  RunScore score{f, budget, seed, 0.0, 0, 0, 0, 0, true, false};
  const auto d = static_cast<std::size_t>(fd.train_x.cols());
  MahalanobisMetric metric = MahalanobisMetric::identity(d);

  if (plan.proportion || plan.condition != Condition::Euc) {
    bool degenerate = false;
    const auto pairs = constraints(plan, fd, budget, seed, degenerate);
    score.similar = pairs.similar.size();
    score.dissimilar = pairs.dissimilar.size();
    if (degenerate || pairs.empty()) {
      score.degenerate = true;
    } else if (learner == Learner::Itml) {
      ItmlConfig cfg = config_.itml;
      cfg.u = fd.thresholds.u;
      cfg.l = fd.thresholds.l;
      auto fit = itml_fit(fd.train_x, pairs, cfg);
      metric = std::move(fit.metric);
      score.iterations = fit.iterations;
      score.converged = fit.converged;
      score.degenerate = fit.empty_constraints;
    } else if (pairs.similar.empty() || pairs.dissimilar.empty()) {
      score.degenerate = true;
    } else {
      const auto comparisons = build_relative_triples(pairs);
      score.comparisons = comparisons.size();
      auto fit = lsml_fit(fd.train_x, comparisons, config_.lsml);
      metric = std::move(fit.metric);
      score.iterations = fit.iterations;
      score.converged = fit.converged && !fit.stalled;
      score.degenerate = fit.empty_constraints;
    }
  }

  const auto predicted = knn_predict_batch(metric, fd.train_x, fd.train_y, fd.test_x, config_.k_neighbors);
  score.accuracy = 100.0 * accuracy(predicted, fd.test_y);
  return score;
}

std::vector<ExperimentResult> evaluate(const Context& ctx, const std::vector<Plan>& plans,
                                       Learner learner) {
  const auto& budgets = ctx.config().budgets;
  const std::size_t per_plan = ctx.folds() * budgets.size();
  const std::size_t total = plans.size() * per_plan;
  std::vector<RunScore> scores(total);
  std::vector<std::exception_ptr> errors(total);

  const auto n = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const auto task = static_cast<std::size_t>(t);
    const std::size_t p = task / per_plan;
    const std::size_t f = (task % per_plan) / budgets.size();
    const std::size_t b = task % budgets.size();
    try {
      scores[task] = ctx.run(plans[p], learner, f, budgets[b]);
    } catch (...) {
      errors[task] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ExperimentResult> out;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    ExperimentResult r;
    r.condition = plans[p].condition;
    r.proportion = plans[p].proportion;
    r.learner = learner;
    r.label = r.proportion ? format_proportion(*r.proportion) : to_string(r.condition);
    r.runs.assign(scores.begin() + static_cast<std::ptrdiff_t>(p * per_plan),
                  scores.begin() + static_cast<std::ptrdiff_t>((p + 1) * per_plan));
    std::tie(r.accuracy_mean, r.accuracy_std) = summarize(r.runs);
    if (const auto bad = r.degenerate_runs())
      log_warning(r.label + ": " + std::to_string(bad) + " of " + std::to_string(r.runs.size()) +
                  " runs had no usable constraints and kept the prior metric");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Plan> sweep_plans(const std::vector<double>& proportions) {
  std::vector<Plan> plans;
  for (double p : proportions) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "proportions must lie in [0, 1]");
    const Condition c = p == 1.0 ? Condition::Lab : p == 0.0 ? Condition::Pro : Condition::Both;
    plans.push_back({c, p});
  }
  return plans;
}

ExperimentResult best_of(const std::vector<ExperimentResult>& rows) {
  auto best = rows.begin();
  for (auto it = rows.begin(); it != rows.end(); ++it)
    if (it->accuracy_mean > best->accuracy_mean) best = it;
  return *best;
}

}  // namespace

ExperimentResult cross_validate(const RelationalSchema& schema, Condition condition,
                                Learner learner, const EvalConfig& config) {
  return run_conditions(schema, {condition}, learner, config).front();
}

std::vector<ExperimentResult> proportion_sweep(const RelationalSchema& schema, Learner learner,
                                               const std::vector<double>& proportions,
                                               const EvalConfig& config) {
  if (proportions.empty()) throw Error(ErrorCode::InvalidArgument, "no proportions given");
  const Context ctx(schema, config);
  return evaluate(ctx, sweep_plans(proportions), learner);
}

std::vector<ExperimentResult> run_conditions(const RelationalSchema& schema,
                                             const std::vector<Condition>& conditions,
                                             Learner learner, const EvalConfig& config) {
  if (conditions.empty()) throw Error(ErrorCode::InvalidArgument, "no conditions given");
  if (config.both_proportions.empty() &&
      std::find(conditions.begin(), conditions.end(), Condition::Both) != conditions.end())
    throw Error(ErrorCode::InvalidArgument, "Both needs at least one proportion");
  const Context ctx(schema, config);

  std::vector<Plan> plans;
  for (Condition c : conditions)
    if (c != Condition::Both) plans.push_back({c, std::nullopt});
  const std::size_t fixed = plans.size();
  const bool want_both = fixed < conditions.size();
  if (want_both) {
    const auto extra = sweep_plans(config.both_proportions);
    plans.insert(plans.end(), extra.begin(), extra.end());
  }
  auto rows = evaluate(ctx, plans, learner);

  std::vector<ExperimentResult> out;
  std::size_t next = 0;
  std::optional<ExperimentResult> both;
  if (want_both) {
    both = best_of(std::vector<ExperimentResult>(rows.begin() + static_cast<std::ptrdiff_t>(fixed), rows.end()));
    both->condition = Condition::Both;
    both->label = to_string(Condition::Both);
  }
  for (Condition c : conditions) out.push_back(c == Condition::Both ? *both : rows[next++]);
  return out;
}

}  // namespace relml
