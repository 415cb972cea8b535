#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fxga {

enum class ErrorCode {
  // data ingestion
  MalformedRow,
  NonMonotonicTimestamp,
  NonPositivePrice,
  SeriesTooShort,
  EmptySplit,
  // indicators
  WindowTooLong,
  BadWindowOrder,
  InvalidWindow,
  InsufficientHistory,
  // classifier
  EmptyInput,
  SingleClassData,
  DimensionMismatch,
  // cross-validation
  FoldTooSmall,
  SingleClassFold,
  // backtest
  MisalignedDecisions,
  // embedding
  PerplexityTooLarge,
  TooFewPoints,
  LengthMismatch,
  // configuration / io
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// True for failures caused by the input data rather than by configuration.
bool is_data_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// 1-based line number for file-level errors.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace fxga
