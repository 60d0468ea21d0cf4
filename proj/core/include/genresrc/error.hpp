#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace genresrc {

enum class ErrorCode {
  UnsupportedFormat,
  CorruptFile,
  EmptyAudio,
  EmptyDataset,
  MixedSampleRates,
  InvalidSpec,
  ZeroPowerSignal,
  TooShort,
  ClipTooShort,
  BadLength,
  TooManyFrames,
  BadShape,
  DimensionMismatch,
  ZeroVector,
  BadColumns,
  EmptyClass,
  UnknownLabel,
  TooFewSamples,
  BadSizes,
  BadConfig,
  BadModel,
  IoError,
  UsageError,
};

std::string_view code_name(ErrorCode code) noexcept;

// Every failure raised by the library. what() carries the human-readable
// context (file, clip id, offending value); code() is stable for callers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace genresrc
