#include "maub/error.hpp"

namespace maub {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kIoError: return "IoError";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kDuplicateSegment: return "DuplicateSegment";
    case Errc::kMalformedFeatureCell: return "MalformedFeatureCell";
    case Errc::kMalformedRow: return "MalformedRow";
    case Errc::kUnknownSegment: return "UnknownSegment";
    case Errc::kEmptyMultiphthong: return "EmptyMultiphthong";
    case Errc::kCyclicRewrite: return "CyclicRewrite";
    case Errc::kOverlapError: return "OverlapError";
    case Errc::kNotAMatrixFile: return "NotAMatrixFile";
    case Errc::kTruncatedFile: return "TruncatedFile";
    case Errc::kInsufficientData: return "InsufficientData";
    case Errc::kInvalidCondition: return "InvalidCondition";
    case Errc::kEmptySequence: return "EmptySequence";
    case Errc::kMissingRepresentation: return "MissingRepresentation";
    case Errc::kTooFewPoints: return "TooFewPoints";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kEmptyCodebook: return "EmptyCodebook";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kEmptyGold: return "EmptyGold";
    case Errc::kAllZeroTargets: return "AllZeroTargets";
    case Errc::kAllMasked: return "AllMasked";
    case Errc::kEmptyReference: return "EmptyReference";
    case Errc::kInvalidCount: return "InvalidCount";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace maub
