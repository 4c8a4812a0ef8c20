#include "tempnet/error.hpp"

namespace tempnet {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedInput: return "MalformedInput";
    case ErrorCode::kNoChapters: return "NoChapters";
    case ErrorCode::kDuplicateChapter: return "DuplicateChapter";
    case ErrorCode::kStorageFailure: return "StorageFailure";
    case ErrorCode::kMissingVolumeFile: return "MissingVolumeFile";
    case ErrorCode::kMalformedManifest: return "MalformedManifest";
    case ErrorCode::kNoAnchorYear: return "NoAnchorYear";
    case ErrorCode::kSpanOutOfBounds: return "SpanOutOfBounds";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kUnknownChapter: return "UnknownChapter";
    case ErrorCode::kUnknownTagger: return "UnknownTagger";
    case ErrorCode::kQuorumUnsatisfiable: return "QuorumUnsatisfiable";
    case ErrorCode::kUnassignedYear: return "UnassignedYear";
    case ErrorCode::kEmptyGraph: return "EmptyGraph";
    case ErrorCode::kEmptyQuery: return "EmptyQuery";
    case ErrorCode::kUnknownBook: return "UnknownBook";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace tempnet
