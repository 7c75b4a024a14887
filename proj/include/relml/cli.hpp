#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "relml/error.hpp"
#include "relml/schema.hpp"

namespace relml::cli {

/// Environment variable naming the default data directory.
inline constexpr const char* kDataDirVariable = "RELML_DATA_DIR";

/// Exit status for an error category: 1 config, 2 data, 3 numerical.
int exit_code(ErrorCategory category);

struct Dataset {
  RelationalSchema schema;  ///< oriented so that the labelled table is the child
  std::string task;         ///< human-readable task name for tables
};

/// Resolves a dataset argument:
///   synthetic:default | synthetic:key=value,...  generated in memory
///   movielens[:dir]                              MovieLens-100k (task item | user)
///   <path>                                       JSON manifest, or a directory holding manifest.json
/// Relative paths that do not exist are retried under $RELML_DATA_DIR;
/// movielens without a directory uses $RELML_DATA_DIR/ml-100k.
Dataset load_dataset(const std::string& spec, const std::string& task);

/// Entry point of the relml tool. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relml::cli
