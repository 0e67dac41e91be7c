#pragma once

#include <stdexcept>
#include <string>

namespace dcmm {

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kEntryOutOfRange,
  kNotInCone,
  kZeroRow,
  kIndivisibleN,
  kNonPositiveDegree,
  kEigenFailure,
  kFirstEigvecNearZero,
  kEmptyCluster,
  kKMeansDegenerate,
  kNegativeUnderRoot,
  kSingularVertexMatrix,
  kZeroDenominator,
  kKTooLarge,
  kConeViolation,
  kBlockSizeMismatch,
  kDegenerateNull,
  kNonPositiveInput,
  kDegenerateX,
  kIoError,
};

const char* error_code_name(ErrorCode code);

class DcmmError : public std::runtime_error {
 public:
  DcmmError(ErrorCode code, const std::string& detail, long index = -1)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code),
        index_(index) {}

  ErrorCode code() const { return code_; }
  long index() const { return index_; }

 private:
  ErrorCode code_;
  long index_;
};

// Error from estimate_all, annotated with the pipeline stage that failed.
class PipelineError : public DcmmError {
 public:
  PipelineError(const std::string& stage, const DcmmError& cause)
      : DcmmError(cause.code(), "[" + stage + "] " + cause.what(), cause.index()),
        stage_(stage) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace dcmm
