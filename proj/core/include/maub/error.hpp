#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maub {

enum class Errc {
  kIoError,
  kInvalidArgument,
  kDuplicateSegment,
  kMalformedFeatureCell,
  kMalformedRow,
  kUnknownSegment,
  kEmptyMultiphthong,
  kCyclicRewrite,
  kOverlapError,
  kNotAMatrixFile,
  kTruncatedFile,
  kInsufficientData,
  kInvalidCondition,
  kEmptySequence,
  kMissingRepresentation,
  kTooFewPoints,
  kDimensionMismatch,
  kEmptyCodebook,
  kEmptyInput,
  kEmptyGold,
  kAllZeroTargets,
  kAllMasked,
  kEmptyReference,
  kInvalidCount,
};

std::string_view to_string(Errc code);

// Every module reports failures through this one exception type; code()
// identifies the failure class, what() carries the human-readable context.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace maub
