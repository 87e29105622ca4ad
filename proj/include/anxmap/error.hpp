#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace anxmap {

enum class ErrorCode {
  MalformedToken,
  EmptyCorpus,
  ZeroDenominator,
  NoPrior,
  VersionMismatch,
  CorruptModel,
  EmptyTestSet,
  EmptySweep,
  BadSweepGrid,
  BadCoordinates,
  BadTimestamp,
  MalformedLine,
  DuplicateId,
  UnreadableSource,
  BadPage,
  BadRange,
  BadZoom,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; `code()` is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  // Item or line index the error refers to, when there is one.
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace anxmap
