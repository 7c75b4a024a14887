#include "relml/error.hpp"

namespace relml {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::DanglingForeignKey: return "DanglingForeignKey";
    case ErrorCode::DuplicateEntityId: return "DuplicateEntityId";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::ParentNotCommon: return "ParentNotCommon";
    case ErrorCode::NoAssociationAttributes: return "NoAssociationAttributes";
    case ErrorCode::NotEnoughEntities: return "NotEnoughEntities";
    case ErrorCode::NoLabels: return "NoLabels";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::GraphEmpty: return "GraphEmpty";
    case ErrorCode::GraphComplete: return "GraphComplete";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::EmptyConstraintSet: return "EmptyConstraintSet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::TooFewTrainingPoints: return "TooFewTrainingPoints";
    case ErrorCode::FoldTooSmall: return "FoldTooSmall";
    case ErrorCode::InvalidCorrelation: return "InvalidCorrelation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidCorrelation:
      return ErrorCategory::Config;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotPsd:
    case ErrorCode::NonSymmetric:
    case ErrorCode::NumericalFailure:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace relml
