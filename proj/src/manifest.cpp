#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "relml/error.hpp"
#include "relml/io.hpp"
#include "relml/log.hpp"
#include "table_builder.hpp"

namespace relml {

using nlohmann::json;
namespace fs = std::filesystem;

namespace detail {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(std::string_view text, std::string_view context) {
  const std::string t = trim(text);
  if (t.empty()) return std::nan("");
  double value = 0.0;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  auto res = std::from_chars(begin, t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw Error(ErrorCode::MalformedInput,
                std::string(context) + ": '" + t + "' is not a number");
  return value;
}

std::pair<std::vector<ClassId>, std::vector<std::string>> encode_labels(
    const std::vector<std::string>& raw, const std::optional<std::size_t>& bins,
    std::string_view context) {
  std::vector<std::string> values;
  values.reserve(raw.size());
  for (const auto& r : raw) {
    values.push_back(trim(r));
    if (values.back().empty())
      throw Error(ErrorCode::MalformedInput, std::string(context) + ": missing label value");
  }
  std::vector<ClassId> ids(values.size());
  std::vector<std::string> names;

  if (bins && *bins > 0) {
    std::vector<double> numeric;
    for (const auto& v : values) numeric.push_back(parse_number(v, context));
    const auto b = quantile_bins(numeric, *bins);
    for (std::size_t i = 0; i < b.size(); ++i) ids[i] = b[i];
    for (std::size_t c = 0; c < *bins; ++c) names.push_back("bin" + std::to_string(c));
    return {ids, names};
  }

  bool all_numeric = true;
  for (const auto& v : values) {
    try {
      parse_number(v, context);
    } catch (const Error&) {
      all_numeric = false;
      break;
    }
  }
  std::vector<std::string> unique(values.begin(), values.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (all_numeric) {
    std::stable_sort(unique.begin(), unique.end(), [&](const std::string& a, const std::string& b) {
      return parse_number(a, context) < parse_number(b, context);
    });
  }
  std::map<std::string, ClassId> code;
  for (std::size_t c = 0; c < unique.size(); ++c) code[unique[c]] = static_cast<ClassId>(c);
  for (std::size_t i = 0; i < values.size(); ++i) ids[i] = code.at(values[i]);
  return {ids, unique};
}

EntityTable build_entity_table(const std::string& name, const csv::Table& data,
                               const std::string& key_column,
                               const std::vector<ColumnSpec>& attributes,
                               const std::optional<LabelSpec>& label, bool standardize) {
  const std::size_t key = data.column(key_column);
  const std::size_t n = data.rows.size();
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& row : data.rows) ids.push_back(trim(row[key]));

  std::vector<std::vector<double>> columns;
  std::vector<std::string> feature_names;
  for (const auto& attr : attributes) {
    if (label && attr.column == label->column) continue;
    const std::size_t c = data.column(attr.column);
    const std::string context = name + "." + attr.column;
    if (attr.kind == AttributeKind::Numerical) {
      std::vector<double> col(n);
      double sum = 0.0;
      std::size_t present = 0;
      for (std::size_t i = 0; i < n; ++i) {
        col[i] = parse_number(data.rows[i][c], context);
        if (!std::isnan(col[i])) {
          sum += col[i];
          ++present;
        }
      }
      const double mean = present ? sum / static_cast<double>(present) : 0.0;
      for (auto& v : col)
        if (std::isnan(v)) v = mean;
      if (standardize) {
        double var = 0.0;
        for (double v : col) var += (v - mean) * (v - mean);
        const double sd = n ? std::sqrt(var / static_cast<double>(n)) : 0.0;
        for (auto& v : col) v = sd > 0.0 ? (v - mean) / sd : 0.0;
      }
      columns.push_back(std::move(col));
      feature_names.push_back(attr.column);
    } else {
      std::set<std::string> levels;
      for (const auto& row : data.rows) {
        auto v = trim(row[c]);
        if (!v.empty()) levels.insert(v);
      }
      for (const auto& level : levels) {
        std::vector<double> col(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          if (trim(data.rows[i][c]) == level) col[i] = 1.0;
        columns.push_back(std::move(col));
        feature_names.push_back(attr.column + "=" + level);
      }
    }
  }

  FeatureMatrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t f = 0; f < columns.size(); ++f)
    for (std::size_t i = 0; i < n; ++i) features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = columns[f][i];

  std::optional<std::vector<ClassId>> labels;
  std::vector<std::string> class_names;
  if (label) {
    const std::size_t c = data.column(label->column);
    std::vector<std::string> raw;
    raw.reserve(n);
    for (const auto& row : data.rows) raw.push_back(row[c]);
    auto [ids_, names] = encode_labels(raw, label->bins ? std::optional(label->bins) : std::nullopt,
                                       name + "." + label->column);
    labels = std::move(ids_);
    class_names = std::move(names);
  }
  return EntityTable(name, std::move(ids), std::move(features), std::move(labels),
                     std::move(feature_names), std::move(class_names));
}

}  // namespace detail

std::vector<int> quantile_bins(const std::vector<double>& values, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "bins must be positive");
  std::vector<int> out(values.size(), 0);
  if (values.empty()) return out;
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double last = static_cast<double>(sorted.size() - 1);
  std::vector<double> edges;
  for (std::size_t b = 1; b < bins; ++b) {
    const double pos = last * static_cast<double>(b) / static_cast<double>(bins);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    edges.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = static_cast<int>(std::count_if(edges.begin(), edges.end(),
                                            [&](double e) { return values[i] > e; }));
  return out;
}

TaskSpec parse_task(std::string_view text) {
  TaskSpec task;
  std::string_view head = text;
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    head = text.substr(0, colon);
    std::string_view opt = text.substr(colon + 1);
    if (opt.rfind("bins=", 0) != 0)
      throw Error(ErrorCode::InvalidArgument, "unknown task option '" + std::string(opt) + "'");
    const double b = detail::parse_number(opt.substr(5), "task bins");
    if (!(b >= 1.0) || b != std::floor(b))
      throw Error(ErrorCode::InvalidArgument, "task bins must be a positive integer");
    task.bins = static_cast<std::size_t>(b);
  }
  if (auto dot = head.find('.'); dot != std::string_view::npos) {
    task.table = std::string(head.substr(0, dot));
    head = head.substr(dot + 1);
  }
  if (head.empty()) throw Error(ErrorCode::InvalidArgument, "empty task column");
  task.column = std::string(head);
  return task;
}

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedInput, path.string() + ": " + e.what());
  }
}

template <typename T>
T required(const json& obj, const char* field, const std::string& context) {
  if (!obj.contains(field))
    throw Error(ErrorCode::MalformedInput, context + ": missing field '" + field + "'");
  try {
    return obj.at(field).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedInput, context + "." + field + ": " + e.what());
  }
}

std::vector<detail::ColumnSpec> read_attributes(const json& obj, const std::string& context) {
  std::vector<detail::ColumnSpec> out;
  if (!obj.contains("attributes")) return out;
  for (const auto& a : obj.at("attributes")) {
    out.push_back({required<std::string>(a, "column", context),
                   parse_attribute_kind(required<std::string>(a, "kind", context))});
  }
  return out;
}

std::optional<detail::LabelSpec> read_label(const json& obj) {
  if (!obj.contains("label") || obj.at("label").is_null()) return std::nullopt;
  const auto& l = obj.at("label");
  if (l.is_string()) return detail::LabelSpec{l.get<std::string>(), 0};
  return detail::LabelSpec{required<std::string>(l, "column", "label"),
                           l.value("bins", std::size_t{0})};
}

struct EntityDecl {
  std::string name;
  csv::Table data;
  std::string key;
  std::vector<detail::ColumnSpec> attributes;
  std::optional<detail::LabelSpec> label;
  bool standardize = true;
};

bool has_column(const csv::Table& t, const std::string& name) {
  return std::find(t.header.begin(), t.header.end(), name) != t.header.end();
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

}  // namespace

RelationalSchema load_schema(const fs::path& manifest_path, const LoadOptions& options) {
  const json manifest = read_json(manifest_path);
  const fs::path base = manifest_path.parent_path();
  const std::string delim_text = manifest.value("delimiter", std::string(","));
  const char delimiter = delim_text == "\\t" ? '\t' : (delim_text.empty() ? ',' : delim_text[0]);

  if (!manifest.contains("entities") || !manifest.contains("association"))
    throw Error(ErrorCode::MalformedInput, manifest_path.string() + ": needs 'entities' and 'association'");

  std::vector<EntityDecl> decls;
  for (const auto& e : manifest.at("entities")) {
    EntityDecl d;
    d.name = required<std::string>(e, "name", "entity");
    d.data = csv::read(base / required<std::string>(e, "file", d.name), delimiter);
    d.key = required<std::string>(e, "key", d.name);
    d.attributes = read_attributes(e, d.name);
    d.label = read_label(e);
    d.standardize = e.value("standardize", true);
    decls.push_back(std::move(d));
  }

  if (options.task) {
    const auto& task = *options.task;
    std::vector<EntityDecl*> owners;
    for (auto& d : decls) {
      if (task.table && d.name != *task.table) continue;
      if (has_column(d.data, task.column)) owners.push_back(&d);
    }
    if (owners.empty())
      throw Error(ErrorCode::UnknownColumn,
                  "label column '" + (task.table ? *task.table + "." : std::string()) + task.column +
                      "' not found in any entity table");
    if (owners.size() > 1)
      throw Error(ErrorCode::InvalidArgument,
                  "label column '" + task.column + "' is ambiguous; qualify it as Table.column");
    for (auto& d : decls) d.label.reset();
    owners.front()->label = detail::LabelSpec{task.column, task.bins};
  }

  std::vector<EntityTable> tables;
  for (const auto& d : decls)
    tables.push_back(detail::build_entity_table(d.name, d.data, d.key, d.attributes, d.label, d.standardize));

  const json& a = manifest.at("association");
  const std::string assoc_name = a.value("name", std::string("association"));
  const auto& parent_ref = a.at("parent");
  const auto& child_ref = a.at("child");
  const std::string parent_table = required<std::string>(parent_ref, "table", assoc_name + ".parent");
  const std::string child_table = required<std::string>(child_ref, "table", assoc_name + ".child");
  const auto attrs = read_attributes(a, assoc_name);
  std::vector<std::string> numeric_names, categorical_names;
  for (const auto& attr : attrs)
    (attr.kind == AttributeKind::Numerical ? numeric_names : categorical_names).push_back(attr.column);

  RelationalSchema schema{std::move(tables),
                          AssociationTable(assoc_name, parent_table, child_table, numeric_names,
                                           categorical_names)};
  const auto& parents = schema.table(parent_table);
  const auto& children = schema.table(child_table);

  const auto data = csv::read(base / required<std::string>(a, "file", assoc_name), delimiter);
  const std::size_t pcol = data.column(required<std::string>(parent_ref, "column", assoc_name));
  const std::size_t ccol = data.column(required<std::string>(child_ref, "column", assoc_name));
  std::vector<std::size_t> num_cols, cat_cols;
  for (const auto& n : numeric_names) num_cols.push_back(data.column(n));
  for (const auto& n : categorical_names) cat_cols.push_back(data.column(n));

  std::size_t duplicates = 0;
  std::vector<double> numeric(num_cols.size());
  std::vector<std::string> categorical(cat_cols.size());
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    const auto& row = data.rows[r];
    const auto p = parents.find(detail::trim(row[pcol]));
    const auto c = children.find(detail::trim(row[ccol]));
    if (!p || !c)
      throw Error(ErrorCode::DanglingForeignKey,
                  assoc_name + " row " + std::to_string(r + 1) + " references unknown " +
                      (!p ? parent_table + " '" + row[pcol] : child_table + " '" + row[ccol]) + "'");
    for (std::size_t m = 0; m < num_cols.size(); ++m)
      numeric[m] = detail::parse_number(row[num_cols[m]], assoc_name + "." + numeric_names[m]);
    for (std::size_t m = 0; m < cat_cols.size(); ++m) categorical[m] = row[cat_cols[m]];
    if (!schema.association.add_row(*p, *c, numeric, categorical)) ++duplicates;
  }
  if (duplicates)
    log_warning(assoc_name + ": kept the first of repeated (parent, child) rows; dropped " +
                std::to_string(duplicates));
  schema.association = normalize_association_numerics(schema.association);
  schema.validate();
  return schema;
}

void write_schema(const RelationalSchema& schema, const fs::path& dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["delimiter"] = ",";
  manifest["entities"] = json::array();
  for (const auto& t : schema.entities) {
    const std::string file = t.name() + ".csv";
    json e{{"name", t.name()}, {"file", file}, {"key", "id"}, {"standardize", false}};
    e["attributes"] = json::array();
    for (const auto& f : t.feature_names()) e["attributes"].push_back({{"column", f}, {"kind", "numerical"}});
    if (t.has_labels()) e["label"] = "class";
    manifest["entities"].push_back(e);

    std::ofstream out(dir / file);
    out << "id";
    for (const auto& f : t.feature_names()) out << ',' << quote_csv(f);
    if (t.has_labels()) out << ",class";
    out << '\n';
    for (std::size_t i = 0; i < t.size(); ++i) {
      out << quote_csv(t.id(i));
      for (Eigen::Index c = 0; c < t.features().cols(); ++c)
        out << ',' << format_double(t.features()(static_cast<Eigen::Index>(i), c));
      if (t.has_labels()) out << ',' << quote_csv(t.class_names().at(static_cast<std::size_t>(t.labels()[i])));
      out << '\n';
    }
  }

  const auto& a = schema.association;
  const std::string pcol = a.parent_table() + "_id";
  const std::string ccol = a.child_table() + "_id";
  json assoc{{"name", a.name()},
             {"file", a.name() + ".csv"},
             {"parent", {{"table", a.parent_table()}, {"column", pcol}}},
             {"child", {{"table", a.child_table()}, {"column", ccol}}}};
  assoc["attributes"] = json::array();
  for (const auto& n : a.numeric_names()) assoc["attributes"].push_back({{"column", n}, {"kind", "numerical"}});
  for (const auto& n : a.categorical_names())
    assoc["attributes"].push_back({{"column", n}, {"kind", "categorical"}});
  manifest["association"] = assoc;

  const auto& parents = schema.parent_table();
  const auto& children = schema.child_table();
  std::ofstream out(dir / (a.name() + ".csv"));
  out << quote_csv(pcol) << ',' << quote_csv(ccol);
  for (const auto& n : a.numeric_names()) out << ',' << quote_csv(n);
  for (const auto& n : a.categorical_names()) out << ',' << quote_csv(n);
  out << '\n';
  for (std::size_t r = 0; r < a.size(); ++r) {
    out << quote_csv(parents.id(a.parent(r))) << ',' << quote_csv(children.id(a.child(r)));
    for (std::size_t m = 0; m < a.alpha(); ++m) {
      out << ',';
      if (!std::isnan(a.numeric(r, m))) out << format_double(a.numeric(r, m));
    }
    for (std::size_t m = 0; m < a.beta(); ++m) {
      out << ',';
      if (a.category(r, m) != AssociationTable::kMissingCategory)
        out << quote_csv(a.category_label(m, a.category(r, m)));
    }
    out << '\n';
  }

  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

}  // namespace relml
