#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qgca {

enum class ErrorCode {
  OrderTooLarge,
  NonFinite,
  LengthMismatch,
  InvalidParams,
  InvalidSpec,
  EmptySample,
  SingularDesign,
  Diverged,
  BicUndefined,
  DegenerateSeries,
  ReferenceUndefined,
  ParseError,
  RaggedRows,
  NonNumericCell,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type for every recoverable failure in the library. The code lets
/// callers (the CLI, the experiment harness) classify failures without string
/// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qgca
