#include "anxmap/error.hpp"

namespace anxmap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedToken: return "MalformedToken";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NoPrior: return "NoPrior";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::EmptySweep: return "EmptySweep";
    case ErrorCode::BadSweepGrid: return "BadSweepGrid";
    case ErrorCode::BadCoordinates: return "BadCoordinates";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnreadableSource: return "UnreadableSource";
    case ErrorCode::BadPage: return "BadPage";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::BadZoom: return "BadZoom";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace anxmap
