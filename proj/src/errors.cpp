#include "hmment/errors.hpp"

namespace hmment {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::ZeroProbabilitySymbol: return "ZeroProbabilitySymbol";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::DivisionByZeroConstantTerm: return "DivisionByZeroConstantTerm";
    case ErrorCode::NonpositiveConstantTerm: return "NonpositiveConstantTerm";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::NotABlackHole: return "NotABlackHole";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::NegativeState: return "NegativeState";
    case ErrorCode::NotNonOverlapping: return "NotNonOverlapping";
    case ErrorCode::QuadratureTooCoarse: return "QuadratureTooCoarse";
    case ErrorCode::NotRankOne: return "NotRankOne";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

}  // namespace hmment
