#include "genresrc/error.hpp"

namespace genresrc {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::EmptyAudio: return "EmptyAudio";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MixedSampleRates: return "MixedSampleRates";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ZeroPowerSignal: return "ZeroPowerSignal";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::ClipTooShort: return "ClipTooShort";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::TooManyFrames: return "TooManyFrames";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::BadColumns: return "BadColumns";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::BadSizes: return "BadSizes";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::BadModel: return "BadModel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace genresrc
