#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occupancy {

enum class ErrorCode {
  EmptyList,
  NonPositiveWeight,
  SumNotOne,
  ZeroBoxes,
  NonFiniteFunctional,
  NegativeInput,
  RangeError,
  FactorialOverflow,
  EqualIndices,
  ApplicabilityError,
  TooLarge,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::ZeroBoxes: return "ZeroBoxes";
    case ErrorCode::NonFiniteFunctional: return "NonFiniteFunctional";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::FactorialOverflow: return "FactorialOverflow";
    case ErrorCode::EqualIndices: return "EqualIndices";
    case ErrorCode::ApplicabilityError: return "ApplicabilityError";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace occupancy
