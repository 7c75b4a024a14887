#include "relml/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "relml/error.hpp"
#include "relml/io.hpp"

namespace relml {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json config_json(const EvalConfig& c) {
  json itml{{"slack", c.itml.slack}, {"max_iter", c.itml.max_iter}, {"tol", c.itml.tol}};
  json lsml{{"margin", c.lsml.margin},
            {"max_iter", c.lsml.max_iter},
            {"tol", c.lsml.tol},
            {"initial_step", c.lsml.initial_step},
            {"max_backtracks", c.lsml.max_backtracks}};
  return {{"seed", c.seed},
          {"k_neighbors", c.k_neighbors},
          {"folds", c.folds},
          {"budgets", c.budgets},
          {"both_proportions", c.both_proportions},
          {"threshold_sample", c.threshold_sample},
          {"gamma", optional_number(c.gamma)},
          {"itml", itml},
          {"lsml", lsml}};
}

json run_json(const RunScore& r) {
  return {{"fold", r.fold},
          {"budget", r.budget},
          {"seed", r.seed},
          {"accuracy", r.accuracy},
          {"similar", r.similar},
          {"dissimilar", r.dissimilar},
          {"comparisons", r.comparisons},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"degenerate", r.degenerate}};
}

}  // namespace

json to_json(const RunRecord& record) {
  json rows = json::array();
  for (const auto& r : record.rows) {
    json runs = json::array();
    for (const auto& s : r.runs) runs.push_back(run_json(s));
    rows.push_back({{"label", r.label},
                    {"condition", to_string(r.condition)},
                    {"proportion", optional_number(r.proportion)},
                    {"accuracy_mean", r.accuracy_mean},
                    {"accuracy_std", r.accuracy_std},
                    {"per_fold", r.per_fold(record.config.folds)},
                    {"per_budget", r.per_budget(record.config.budgets)},
                    {"degenerate_runs", r.degenerate_runs()},
                    {"runs", runs}});
  }
  return {{"command", record.command},
          {"dataset", record.dataset},
          {"task", record.task},
          {"learner", to_string(record.learner)},
          {"std", "population, over all fold x budget runs"},
          {"config", config_json(record.config)},
          {"rows", rows}};
}

void write_run_file(const std::filesystem::path& path, const RunRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << to_json(record).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::InvalidArgument, "failed writing " + path.string());
}

double recomputation_error(const json& run_file) {
  if (!run_file.contains("rows") || !run_file["rows"].is_array())
    throw Error(ErrorCode::MalformedInput, "run file has no rows");
  double worst = 0.0;
  for (const auto& row : run_file["rows"]) {
    std::vector<RunScore> runs;
    for (const auto& r : row.at("runs"))
      runs.push_back({r.at("fold").get<std::size_t>(), r.at("budget").get<std::size_t>(), 0,
                      r.at("accuracy").get<double>(), 0, 0, 0, 0, true, false});
    const auto [mean, sd] = summarize(runs);
    worst = std::max({worst, std::abs(mean - row.at("accuracy_mean").get<double>()),
                      std::abs(sd - row.at("accuracy_std").get<double>())});
  }
  return worst;
}

namespace {

std::string cell(const ExperimentResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", r.accuracy_mean, r.accuracy_std);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  // Cells contain one two-byte character; pad by display width.
  std::size_t shown = 0;
  for (unsigned char ch : s)
    if ((ch & 0xC0) != 0x80) ++shown;
  return s + std::string(width > shown ? width - shown : 0, ' ');
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string format_table(const std::vector<ExperimentResult>& rows, const std::string& column,
                         const std::string& row_header) {
  std::size_t w0 = row_header.size();
  std::size_t w1 = column.size();
  for (const auto& r : rows) {
    w0 = std::max(w0, r.label.size());
    w1 = std::max(w1, cell(r).size() - 1);
  }
  std::ostringstream out;
  out << pad(row_header, w0 + 2) << column << '\n';
  for (const auto& r : rows) {
    out << pad(r.label, w0 + 2) << cell(r);
    if (r.condition == Condition::Both && r.proportion && r.label == to_string(Condition::Both))
      out << "  (proportion " << format_proportion(*r.proportion) << ")";
    out << '\n';
  }
  return out.str();
}

std::string format_csv(const std::vector<ExperimentResult>& rows, const std::string& task) {
  std::ostringstream out;
  out << "row,task,mean,std,runs,degenerate_runs\n";
  for (const auto& r : rows)
    out << csv_field(r.label) << ',' << csv_field(task) << ',' << format_double(r.accuracy_mean) << ','
        << format_double(r.accuracy_std) << ',' << r.runs.size() << ',' << r.degenerate_runs() << '\n';
  return out.str();
}

}  // namespace relml
