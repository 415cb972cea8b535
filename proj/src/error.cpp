#include "fxga/error.hpp"

namespace fxga {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::BadWindowOrder: return "BadWindowOrder";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SingleClassData: return "SingleClassData";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::FoldTooSmall: return "FoldTooSmall";
    case ErrorCode::SingleClassFold: return "SingleClassFold";
    case ErrorCode::MisalignedDecisions: return "MisalignedDecisions";
    case ErrorCode::PerplexityTooLarge: return "PerplexityTooLarge";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_data_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::BadWindowOrder:
    case ErrorCode::InvalidWindow:
    case ErrorCode::PerplexityTooLarge:
      return false;
    default:
      return true;
  }
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
  std::string out{to_string(code)};
  if (line) out += " (line " + std::to_string(*line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace fxga
