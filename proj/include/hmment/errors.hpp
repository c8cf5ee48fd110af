#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmment {

enum class ErrorCode {
  InvalidModel,
  NotIrreducible,
  SymbolOutOfRange,
  ZeroProbabilitySymbol,
  OrderMismatch,
  DivisionByZeroConstantTerm,
  NonpositiveConstantTerm,
  EnumerationTooLarge,
  NotABlackHole,
  RegimeViolation,
  NegativeState,
  NotNonOverlapping,
  QuadratureTooCoarse,
  NotRankOne,
  DomainError,
  Overflow,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hmment
