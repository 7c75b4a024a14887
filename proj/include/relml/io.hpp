#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relml/schema.hpp"

namespace relml {

/// Which column becomes the class label, optionally binned into equal
/// frequency quantile bins (for continuous targets).
struct TaskSpec {
  std::optional<std::string> table;
  std::string column;
  std::size_t bins = 0;  ///< 0 = use values as classes
};

/// Parses "column", "Table.column" or either followed by ":bins=N".
TaskSpec parse_task(std::string_view text);

struct LoadOptions {
  std::optional<TaskSpec> task;  ///< replaces every label declared in the manifest
};

/// Loads a JSON schema manifest and the delimiter-separated files it names.
///
/// Manifest layout:
/// \code
/// {
///   "delimiter": ",",
///   "entities": [
///     {"name": "Movie", "file": "movies.csv", "key": "movie_id",
///      "attributes": [{"column": "year", "kind": "numerical"},
///                     {"column": "genre", "kind": "categorical"}],
///      "label": "genre", "standardize": true}
///   ],
///   "association": {"name": "Ratings", "file": "ratings.csv",
///                   "parent": {"table": "User", "column": "user_id"},
///                   "child": {"table": "Movie", "column": "movie_id"},
///                   "attributes": [{"column": "rating", "kind": "numerical"}]}
/// }
/// \endcode
/// Paths are relative to the manifest. Categorical entity attributes are
/// one-hot encoded; numeric ones have missing values mean-imputed and are
/// z-scored unless "standardize" is false. The label column never becomes a
/// feature. "label" may also be {"column": "year", "bins": 5}. Numeric
/// association attributes are min-max scaled into [0, 1].
RelationalSchema load_schema(const std::filesystem::path& manifest, const LoadOptions& options = {});

/// Writes a manifest plus one CSV per table such that load_schema reproduces
/// the schema (features as numeric columns, standardization off).
void write_schema(const RelationalSchema& schema, const std::filesystem::path& dir);

/// Loads MovieLens-100k from its native files (u.data, u.item, u.user).
/// `task` is "item" (movies, label = most popular of the movie's genres) or
/// "user" (users, label = age in 5 quantile bins). The returned schema is
/// oriented toward the target table with ratings (scaled into [0, 1]) as the
/// numeric association attribute.
RelationalSchema load_movielens(const std::filesystem::path& dir, std::string_view task);

/// Equal-frequency bin index for each value (linear-interpolated quantile
/// edges; a value equal to an edge falls into the lower bin).
std::vector<int> quantile_bins(const std::vector<double>& values, std::size_t bins);

namespace csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws UnknownColumn.
  std::size_t column(const std::string& name) const;
};

/// Reads a delimited file with a header row. Double quotes group fields.
Table read(const std::filesystem::path& path, char delimiter = ',');
std::vector<std::string> split_line(std::string_view line, char delimiter);

}  // namespace csv

/// Shortest round-trip text form of a double.
std::string format_double(double value);

}  // namespace relml
