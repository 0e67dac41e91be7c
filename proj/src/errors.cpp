#include "dcmm/errors.hpp"

namespace dcmm {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEntryOutOfRange: return "EntryOutOfRange";
    case ErrorCode::kNotInCone: return "NotInCone";
    case ErrorCode::kZeroRow: return "ZeroRow";
    case ErrorCode::kIndivisibleN: return "IndivisibleN";
    case ErrorCode::kNonPositiveDegree: return "NonPositiveDegree";
    case ErrorCode::kEigenFailure: return "EigenFailure";
    case ErrorCode::kFirstEigvecNearZero: return "FirstEigvecNearZero";
    case ErrorCode::kEmptyCluster: return "EmptyCluster";
    case ErrorCode::kKMeansDegenerate: return "KMeansDegenerate";
    case ErrorCode::kNegativeUnderRoot: return "NegativeUnderRoot";
    case ErrorCode::kSingularVertexMatrix: return "SingularVertexMatrix";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kConeViolation: return "ConeViolation";
    case ErrorCode::kBlockSizeMismatch: return "BlockSizeMismatch";
    case ErrorCode::kDegenerateNull: return "DegenerateNull";
    case ErrorCode::kNonPositiveInput: return "NonPositiveInput";
    case ErrorCode::kDegenerateX: return "DegenerateX";
    case ErrorCode::kIoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace dcmm
