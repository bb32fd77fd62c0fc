#include "tsl/error.hpp"

namespace tsl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OrderingViolation: return "OrderingViolation";
    case ErrorCode::DegenerateBoundaryRow: return "DegenerateBoundaryRow";
    case ErrorCode::PositivityViolation: return "PositivityViolation";
    case ErrorCode::AtTransmissionPointWithoutSide: return "AtTransmissionPointWithoutSide";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::StraddlesTransmissionPoint: return "StraddlesTransmissionPoint";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::SingularPlusBlock: return "SingularPlusBlock";
    case ErrorCode::SingularMinusBlock: return "SingularMinusBlock";
    case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorCode::PieceMismatch: return "PieceMismatch";
    case ErrorCode::ZeroOnContour: return "ZeroOnContour";
    case ErrorCode::QuadratureInconclusive: return "QuadratureInconclusive";
    case ErrorCode::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorCode::LostBracket: return "LostBracket";
    case ErrorCode::CompletenessMismatch: return "CompletenessMismatch";
    case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::ConsistencyFailure: return "ConsistencyFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace tsl
