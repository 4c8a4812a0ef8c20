#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tempnet {

enum class ErrorCode {
  kMalformedInput,
  kNoChapters,
  kDuplicateChapter,
  kStorageFailure,
  kMissingVolumeFile,
  kMalformedManifest,
  kNoAnchorYear,
  kSpanOutOfBounds,
  kUnknownLabel,
  kUnknownChapter,
  kUnknownTagger,
  kQuorumUnsatisfiable,
  kUnassignedYear,
  kEmptyGraph,
  kEmptyQuery,
  kUnknownBook,
  kMissingArtifact,
  kNotFound,
  kInvalidArgument,
};

std::string_view error_name(ErrorCode code);

/// Every failure raised by the library. The code is stable and machine
/// readable; the message names the offending input where there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tempnet
