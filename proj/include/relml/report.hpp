#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relml/evaluation.hpp"

namespace relml {

/// Everything a run file records: the inputs that determine the result and
/// every raw fold x budget score. Contains no timestamps or host details, so
/// equal inputs give byte-identical files.
struct RunRecord {
  std::string command;  ///< "run" or "sweep"
  std::string dataset;
  std::string task;     ///< label column / task name, free text
  Learner learner = Learner::Itml;
  EvalConfig config;
  std::vector<ExperimentResult> rows;
};

nlohmann::json to_json(const RunRecord& record);

/// Pretty-printed JSON followed by a newline.
void write_run_file(const std::filesystem::path& path, const RunRecord& record);

/// Largest difference between the mean / std stored for each row and the
/// values recomputed from its raw run accuracies. Throws MalformedInput.
double recomputation_error(const nlohmann::json& run_file);

/// Plain-text table: one row per condition or proportion, one column for the
/// task, cells "mean ± std" with two decimals.
std::string format_table(const std::vector<ExperimentResult>& rows, const std::string& column,
                         const std::string& row_header = "condition");
/// CSV with full-precision numbers: row,task,mean,std,runs,degenerate_runs.
std::string format_csv(const std::vector<ExperimentResult>& rows, const std::string& task);

}  // namespace relml
