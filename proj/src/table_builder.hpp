#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relml/io.hpp"
#include "relml/schema.hpp"

namespace relml::detail {

struct ColumnSpec {
  std::string column;
  AttributeKind kind;
};

struct LabelSpec {
  std::string column;
  std::size_t bins = 0;
};

std::string trim(std::string_view s);

/// NaN for an empty field; throws MalformedInput for anything unparsable.
double parse_number(std::string_view text, std::string_view context);

/// Builds an entity table from parsed CSV columns: one-hot categorical
/// attributes, mean-imputed (and optionally z-scored) numeric attributes, and
/// the label column encoded as class ids.
EntityTable build_entity_table(const std::string& name, const csv::Table& data,
                               const std::string& key_column,
                               const std::vector<ColumnSpec>& attributes,
                               const std::optional<LabelSpec>& label, bool standardize);

/// Class ids for raw label strings: numeric sort when every value parses as a
/// number, lexicographic otherwise.
std::pair<std::vector<ClassId>, std::vector<std::string>> encode_labels(
    const std::vector<std::string>& raw, const std::optional<std::size_t>& bins,
    std::string_view context);

}  // namespace relml::detail
