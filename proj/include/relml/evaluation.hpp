#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relml/access_audit.hpp"
#include "relml/itml.hpp"
#include "relml/lsml.hpp"
#include "relml/schema.hpp"

namespace relml {

/// Constraint families compared in an experiment. Euc is the untrained
/// identity metric; Both is the best row of a proportion sweep.
enum class Condition { Euc, Lab, Rel, Pro, Both };
enum class Learner { Itml, Lsml };

const char* to_string(Condition c);
const char* to_string(Learner l);
/// Accepts euc, lab, rel, ls / pro, both (case-insensitive). Throws InvalidArgument.
Condition parse_condition(std::string_view text);
Learner parse_learner(std::string_view text);

inline const std::vector<double>& default_proportions() {
  static const std::vector<double> p{1.0, 0.8, 0.6, 0.4, 0.2, 0.0};
  return p;
}

struct EvalConfig {
  std::size_t k_neighbors = 5;
  std::size_t folds = 3;
  std::uint64_t seed = 0;
  std::vector<std::size_t> budgets{100, 200, 300, 400, 500};
  /// Proportions tried by the Both condition.
  std::vector<double> both_proportions = default_proportions();
  /// Pairs sampled per fold to pick the ITML thresholds u and l.
  std::size_t threshold_sample = 2000;
  /// Link-strength balance; alpha / (alpha + beta) of the association when unset.
  std::optional<double> gamma;
  ItmlConfig itml;  ///< u and l are replaced by per-fold estimates
  LsmlConfig lsml;
  /// When set, every fold records the entity ids read while building
  /// constraints and fitting, for the leakage check.
  AccessAudit* audit = nullptr;

  /// Throws InvalidArgument (k >= 1, folds >= 2, non-empty budgets >= 2).
  void validate() const;
};

/// One fold x budget evaluation.
struct RunScore {
  std::size_t fold;
  std::size_t budget;
  std::uint64_t seed;      ///< stream seed of this run
  double accuracy;         ///< percent correct on the held-out fold
  std::size_t similar;     ///< constraint counts actually used
  std::size_t dissimilar;
  std::size_t comparisons; ///< relative comparisons (LSML only)
  std::size_t iterations;
  bool converged;
  /// No usable signal (all link strengths equal, graph empty or complete,
  /// empty constraint set); the prior metric was used.
  bool degenerate;
};

struct ExperimentResult {
  Condition condition;
  std::optional<double> proportion;  ///< sweep rows and the chosen Both row
  Learner learner;
  std::string label;  ///< table row name: the condition, or the proportion of a sweep row
  double accuracy_mean = 0.0;  ///< percent, over all fold x budget runs
  double accuracy_std = 0.0;   ///< population standard deviation of the same runs
  std::vector<RunScore> runs;  ///< fold-major, then budget order

  /// Mean accuracy per fold (equal weight per budget) and per budget.
  std::vector<double> per_fold(std::size_t folds) const;
  std::vector<double> per_budget(const std::vector<std::size_t>& budgets) const;
  std::size_t degenerate_runs() const;
};

/// "1.0", "0.8", "0.25": one or two decimals.
std::string format_proportion(double p);

/// Mean and population standard deviation of run accuracies.
std::pair<double, double> summarize(const std::vector<RunScore>& runs);

/// Shuffled k-fold split of [0, n): fold f is the f-th contiguous block of a
/// seeded permutation; each fold is returned sorted.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

/// k-NN accuracy of the child table's labels under each constraint family.
/// For every fold and budget, constraints come from the training rows only,
/// the metric is fit on training features and scored on the held-out rows.
/// Runs execute in parallel; results do not depend on the thread count.
/// Throws NoLabels, FoldTooSmall.
ExperimentResult cross_validate(const RelationalSchema& schema, Condition condition,
                                Learner learner, const EvalConfig& config);

/// Label constraints mixed with link-strength constraints at each proportion
/// (1 = labels only, 0 = link strength only), with folds and seeds shared
/// across rows.
std::vector<ExperimentResult> proportion_sweep(const RelationalSchema& schema, Learner learner,
                                               const std::vector<double>& proportions,
                                               const EvalConfig& config);

/// cross_validate for each condition, in order.
std::vector<ExperimentResult> run_conditions(const RelationalSchema& schema,
                                             const std::vector<Condition>& conditions,
                                             Learner learner, const EvalConfig& config);

}  // namespace relml
