#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relml {

enum class ErrorCode {
  // Input and schema problems.
  MissingFile,
  UnknownColumn,
  DanglingForeignKey,
  DuplicateEntityId,
  UnknownEntity,
  MalformedInput,
  // Link strength.
  ParentNotCommon,
  NoAssociationAttributes,
  // Constraint generation.
  NotEnoughEntities,
  NoLabels,
  SingleClass,
  GraphEmpty,
  GraphComplete,
  EmptySource,
  EmptyConstraintSet,
  // Linear algebra.
  DimensionMismatch,
  NotPsd,
  NonSymmetric,
  NumericalFailure,
  // Evaluation.
  TooFewTrainingPoints,
  FoldTooSmall,
  InvalidCorrelation,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorCategory { Config, Data, Numerical };

ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace relml
