#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hubkit {

enum class ErrorCode {
  ZeroVectorRow,
  NonFiniteInput,
  DimMismatch,
  NonPositiveTau,
  LengthMismatch,
  KOutOfRange,
  ColMismatch,
  RowMismatch,
  ShapeMismatch,
  ZeroMarginalEntry,
  InvalidConfig,
  EmptyPlan,
  IndexOutOfRange,
  BadMagic,
  TruncatedFile,
  SizeMismatch,
  IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every library failure is reported through this type; `code()` is the
// machine-checkable part, `what()` carries the human detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hubkit
