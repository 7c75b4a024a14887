#include "relml/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "relml/constraints.hpp"
#include "relml/evaluation.hpp"
#include "relml/io.hpp"
#include "relml/kernels.hpp"
#include "relml/link_strength.hpp"
#include "relml/log.hpp"
#include "relml/random.hpp"
#include "relml/report.hpp"
#include "relml/synthetic.hpp"

namespace fs = std::filesystem;

namespace relml::cli {

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return 1;
    case ErrorCategory::Data: return 2;
    case ErrorCategory::Numerical: return 3;
  }
  return 3;
}

namespace {

std::optional<fs::path> data_dir() {
  if (const char* dir = std::getenv(kDataDirVariable); dir && *dir) return fs::path(dir);
  return std::nullopt;
}

fs::path resolve_path(const fs::path& p) {
  if (p.is_relative() && !fs::exists(p))
    if (auto dir = data_dir(); dir && fs::exists(*dir / p)) return *dir / p;
  return p;
}

RelationalSchema orient_to_labels(RelationalSchema schema, const std::optional<TaskSpec>& task) {
  const auto& parent = schema.association.parent_table();
  const auto& child = schema.association.child_table();
  if (task && task->table) {
    if (*task->table != parent && *task->table != child)
      throw Error(ErrorCode::UnknownColumn, "table '" + *task->table + "' is not linked by " +
                                                schema.association.name());
    return schema.oriented_toward(*task->table);
  }
  if (schema.table(child).has_labels()) return schema;
  if (schema.table(parent).has_labels()) return schema.oriented_toward(parent);
  throw Error(ErrorCode::NoLabels, "neither " + parent + " nor " + child +
                                       " has a label column; pass --task Table.column");
}

}  // namespace

Dataset load_dataset(const std::string& spec, const std::string& task) {
  if (spec.rfind("synthetic:", 0) == 0 || spec == "synthetic") {
    const auto config = parse_synthetic_spec(spec.size() > 10 ? spec.substr(10) : "default");
    return {generate_synthetic(config), "synthetic"};
  }
  if (spec.rfind("movielens", 0) == 0) {
    fs::path dir;
    if (spec.size() > 10 && spec[9] == ':') dir = resolve_path(spec.substr(10));
    else if (auto d = data_dir()) dir = *d / "ml-100k";
    else
      throw Error(ErrorCode::MissingFile, std::string("movielens needs a directory: movielens:<dir> or $") +
                                              kDataDirVariable);
    std::string t = task.empty() ? "item" : task;
    if (t == "genre" || t == "movie") t = "item";
    if (t == "age") t = "user";
    return {load_movielens(dir, t), "Movie-" + t};
  }
  fs::path path = resolve_path(spec);
  if (fs::is_directory(path)) path /= "manifest.json";
  LoadOptions options;
  if (!task.empty()) options.task = parse_task(task);
  auto schema = orient_to_labels(load_schema(path, options), options.task);
  const std::string name = task.empty() ? schema.child_table().name() : task;
  return {std::move(schema), name};
}

namespace {

struct EvalOptions {
  std::string dataset;
  std::string task;
  std::string learner = "itml";
  std::vector<std::size_t> budgets{100, 200, 300, 400, 500};
  std::optional<std::size_t> constraints;
  std::size_t folds = 3;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::optional<double> gamma;
  std::string output;
  double slack = 1.0;
  double margin = 0.0;
};

void add_eval_options(CLI::App& cmd, EvalOptions& o) {
  cmd.add_option("--dataset,-d", o.dataset, "synthetic:<params>, movielens[:dir] or a manifest path")->required();
  cmd.add_option("--task,-t", o.task, "label column (Table.column[:bins=N]) or MovieLens task item|user");
  cmd.add_option("--learner,-l", o.learner, "itml or lsml")->capture_default_str();
  cmd.add_option("--budgets", o.budgets, "constraint budgets (sampled pairs per run)")->delimiter(',');
  cmd.add_option("--constraints,-n", o.constraints, "single constraint budget, overrides --budgets");
  cmd.add_option("--folds", o.folds, "cross-validation folds")->capture_default_str();
  cmd.add_option("--k", o.k, "neighbours for k-NN")->capture_default_str();
  cmd.add_option("--seed,-s", o.seed, "seed for every random choice")->capture_default_str();
  cmd.add_option("--gamma", o.gamma, "link-strength balance, default alpha / (alpha + beta)");
  cmd.add_option("--slack", o.slack, "ITML slack")->capture_default_str();
  cmd.add_option("--margin", o.margin, "LSML margin")->capture_default_str();
  cmd.add_option("--output,-o", o.output, "directory for run.json, table.txt and table.csv");
}

EvalConfig make_config(const EvalOptions& o) {
  EvalConfig c;
  c.k_neighbors = o.k;
  c.folds = o.folds;
  c.seed = o.seed;
  c.budgets = o.constraints ? std::vector<std::size_t>{*o.constraints} : o.budgets;
  c.gamma = o.gamma;
  c.itml.slack = o.slack;
  c.lsml.margin = o.margin;
  c.validate();
  return c;
}

void emit(const RunRecord& record, const std::string& row_header, const std::string& output,
          std::ostream& out) {
  const auto table = format_table(record.rows, record.task, row_header);
  out << table;
  if (output.empty()) return;
  const fs::path dir(output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "cannot create " + dir.string() + ": " + ec.message());
  write_run_file(dir / "run.json", record);
  std::ofstream(dir / "table.txt", std::ios::binary) << table;
  std::ofstream(dir / "table.csv", std::ios::binary) << format_csv(record.rows, record.task);
  out << "wrote " << (dir / "run.json").string() << '\n';
}

std::vector<Condition> parse_conditions(const std::vector<std::string>& names) {
  std::vector<Condition> out;
  for (const auto& n : names) out.push_back(parse_condition(n));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no conditions given");
  return out;
}

int cmd_run(const EvalOptions& o, const std::vector<std::string>& conditions,
            const std::vector<double>& proportions, std::ostream& out) {
  auto config = make_config(o);
  config.both_proportions = proportions;
  const auto learner = parse_learner(o.learner);
  const auto conds = parse_conditions(conditions);
  const auto data = load_dataset(o.dataset, o.task);
  RunRecord record{"run", o.dataset, data.task, learner, config, {}};
  record.rows = run_conditions(data.schema, conds, learner, config);
  emit(record, "condition", o.output, out);
  return 0;
}

int cmd_sweep(const EvalOptions& o, const std::vector<double>& proportions,
              std::optional<double> single, std::ostream& out) {
  const auto config = make_config(o);
  const auto learner = parse_learner(o.learner);
  const auto props = single ? std::vector<double>{*single} : proportions;
  const auto data = load_dataset(o.dataset, o.task);
  RunRecord record{"sweep", o.dataset, data.task, learner, config, {}};
  record.rows = proportion_sweep(data.schema, learner, props, config);
  emit(record, "proportion", o.output, out);
  return 0;
}

std::size_t entity_row(const EntityTable& table, const std::string& key, bool by_index) {
  if (!by_index) return table.index_of(key);
  std::size_t row = 0;
  std::istringstream in(key);
  if (!(in >> row) || !in.eof() || row >= table.size())
    throw Error(ErrorCode::UnknownEntity, "row '" + key + "' of " + table.name());
  return row;
}

int cmd_inspect(const std::string& dataset, const std::string& task, const std::string& a,
                const std::string& b, bool by_index, std::optional<double> gamma, std::ostream& out) {
  const auto data = load_dataset(dataset, task);
  const auto& children = data.schema.child_table();
  const std::size_t i = entity_row(children, a, by_index);
  const std::size_t j = entity_row(children, b, by_index);
  const auto assoc = normalize_association_numerics(data.schema.association);
  const ParentIndex index(assoc, children.size());
  const auto params = gamma ? LinkStrengthParams(*gamma, assoc.alpha(), assoc.beta())
                            : LinkStrengthParams::balanced(assoc);
  const auto br = explain_link_strength(index, params, i, j);
  const auto& parents = data.schema.parent_table();

  out << "pair: " << children.id(i) << " " << children.id(j) << " (" << children.name() << " rows " << i
      << ", " << j << ")\n";
  out << "common parents: " << br.parents.size() << "\n";
  out << "gamma: " << format_double(br.gamma) << "\n";
  if (!br.parents.empty()) {
    std::size_t width = parents.name().size();
    for (const auto& c : br.parents) width = std::max(width, parents.id(c.parent).size());
    out << std::left << std::setw(static_cast<int>(width + 2)) << parents.name() << std::setw(24) << "w"
        << std::setw(24) << "z"
        << "contribution\n";
    for (const auto& c : br.parents)
      out << std::setw(static_cast<int>(width + 2)) << parents.id(c.parent) << std::setw(24)
          << format_double(c.w) << std::setw(24) << format_double(c.z) << format_double(c.total) << "\n";
  }
  out << "link strength: " << format_double(br.total) << "\n";
  return 0;
}

int cmd_generate(const std::string& params, const std::string& output, std::ostream& out) {
  const auto config = parse_synthetic_spec(params);
  const auto schema = generate_synthetic(config);
  write_schema(schema, output);
  out << "wrote " << (fs::path(output) / "manifest.json").string() << " (" << describe(config) << ")\n";
  return 0;
}

int cmd_constraints(const std::string& dataset, const std::string& task, const std::string& strategy,
                    std::size_t n_max, double proportion, std::uint64_t seed, const std::string& format,
                    std::optional<double> gamma, const std::string& output, std::ostream& out) {
  if (format != "pairs" && format != "comparisons")
    throw Error(ErrorCode::InvalidArgument, "format must be pairs or comparisons");
  const auto data = load_dataset(dataset, task);
  const auto& children = data.schema.child_table();
  const auto assoc = normalize_association_numerics(data.schema.association);
  const ParentIndex index(assoc, children.size());
  const auto params = gamma ? LinkStrengthParams(*gamma, assoc.alpha(), assoc.beta())
                            : LinkStrengthParams::balanced(assoc);
  std::vector<std::size_t> all(children.size());
  for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;

  auto labels = [&] { return label_constraints(children.labels(), {n_max, derive_seed(seed, "label")}); };
  auto ls = [&] { return select_link_strength_constraints(index, params, all, {n_max, derive_seed(seed, "ls")}); };
  PairConstraintSet set;
  if (strategy == "label") set = labels();
  else if (strategy == "ls") set = ls();
  else if (strategy == "rel") set = relative_link_constraints(index, all, {n_max, derive_seed(seed, "rel")});
  else if (strategy == "mixed") set = mix_constraints(labels(), ls(), proportion, derive_seed(seed, "mix"));
  else throw Error(ErrorCode::InvalidArgument, "strategy must be label, rel, ls or mixed");
  if (set.degenerate) log_warning("all sampled pairs have the same link strength; S and D carry no signal");

  std::ostringstream text;
  if (format == "pairs") write_pairs(text, set, children.ids());
  else write_comparisons(text, build_relative_triples(set), children.ids());
  if (output.empty()) {
    out << text.str();
  } else {
    std::ofstream file(output, std::ios::binary);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write " + output);
    file << text.str();
    out << "wrote " << set.similar.size() << " similar and " << set.dissimilar.size() << " dissimilar pairs to "
        << output << "\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relational metric learning: link-strength constraints, ITML / LSML and k-NN evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  bool verbose = false, quiet = false;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  app.add_flag("--verbose,-v", verbose, "log progress details");
  app.add_flag("--quiet,-q", quiet, "only log errors");

  EvalOptions run_opts;
  std::vector<std::string> conditions{"euc", "lab", "rel", "ls", "both"};
  std::vector<double> both_props = default_proportions();
  auto* run_cmd = app.add_subcommand("run", "cross-validated k-NN accuracy per constraint condition");
  add_eval_options(*run_cmd, run_opts);
  run_cmd->add_option("--conditions,-c", conditions, "subset of euc,lab,rel,ls,both")->delimiter(',');
  run_cmd->add_option("--proportions", both_props, "label proportions tried for both")->delimiter(',');

  EvalOptions sweep_opts;
  std::vector<double> proportions = default_proportions();
  std::optional<double> proportion;
  auto* sweep_cmd = app.add_subcommand("sweep", "accuracy while label constraints give way to link strength");
  add_eval_options(*sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--proportions", proportions, "label proportions")->delimiter(',');
  sweep_cmd->add_option("--proportion,-p", proportion, "single label proportion");

  std::string ip_dataset, ip_task, ip_a, ip_b;
  bool ip_index = false;
  std::optional<double> ip_gamma;
  auto* inspect_cmd = app.add_subcommand("inspect-pair", "per-parent link-strength breakdown of two entities");
  inspect_cmd->add_option("--dataset,-d", ip_dataset, "dataset")->required();
  inspect_cmd->add_option("--task,-t", ip_task, "label column or MovieLens task");
  inspect_cmd->add_option("first", ip_a, "entity id")->required();
  inspect_cmd->add_option("second", ip_b, "entity id")->required();
  inspect_cmd->add_flag("--index", ip_index, "treat the ids as row numbers");
  inspect_cmd->add_option("--gamma", ip_gamma, "link-strength balance");

  std::string gen_params = "default", gen_output;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "write a synthetic relational dataset as manifest + CSV");
  gen_cmd->add_option("--params", gen_params, "key=value,... overrides")->capture_default_str();
  gen_cmd->add_option("--output,-o", gen_output, "directory")->required();

  std::string cs_dataset, cs_task, cs_strategy = "ls", cs_format = "pairs", cs_output;
  std::size_t cs_n = 300;
  double cs_prop = 0.5;
  std::uint64_t cs_seed = 0;
  std::optional<double> cs_gamma;
  auto* cs_cmd = app.add_subcommand("constraints", "export a constraint set over the whole dataset");
  cs_cmd->add_option("--dataset,-d", cs_dataset, "dataset")->required();
  cs_cmd->add_option("--task,-t", cs_task, "label column or MovieLens task");
  cs_cmd->add_option("--strategy", cs_strategy, "label, rel, ls or mixed")->capture_default_str();
  cs_cmd->add_option("--constraints,-n", cs_n, "sampled pairs")->capture_default_str();
  cs_cmd->add_option("--proportion,-p", cs_prop, "label share for mixed")->capture_default_str();
  cs_cmd->add_option("--seed,-s", cs_seed, "seed")->capture_default_str();
  cs_cmd->add_option("--format", cs_format, "pairs (S/D lines) or comparisons (i j k[ l])")->capture_default_str();
  cs_cmd->add_option("--gamma", cs_gamma, "link-strength balance");
  cs_cmd->add_option("--output,-o", cs_output, "file, default stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  set_log_level(quiet ? LogLevel::Error : verbose ? LogLevel::Info : LogLevel::Warning);
  if (threads > 0) kernels::set_threads(threads);

  try {
    if (*run_cmd) return cmd_run(run_opts, conditions, both_props, out);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, proportions, proportion, out);
    if (*inspect_cmd) return cmd_inspect(ip_dataset, ip_task, ip_a, ip_b, ip_index, ip_gamma, out);
    if (*gen_cmd) return cmd_generate(gen_params, gen_output, out);
    if (*cs_cmd)
      return cmd_constraints(cs_dataset, cs_task, cs_strategy, cs_n, cs_prop, cs_seed, cs_format, cs_gamma,
                             cs_output, out);
  } catch (const Error& e) {
    const auto category = category_of(e.code());
    err << "error: " << e.what() << "\n";
    if (category == ErrorCategory::Numerical)
      err << "numerical failure; rerun with --verbose for per-iteration learner logs\n";
    return exit_code(category);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace relml::cli
