#include "sftkit/errors.hpp"

namespace sftkit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ReferenceError: return "ReferenceError";
    case ErrorKind::UnknownCommand: return "UnknownCommand";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DegenerateCover: return "DegenerateCover";
    case ErrorKind::DegenerateOperator: return "DegenerateOperator";
    case ErrorKind::ZeroCrossing: return "ZeroCrossing";
    case ErrorKind::InsufficientWindow: return "InsufficientWindow";
    case ErrorKind::MissingSpectralData: return "MissingSpectralData";
    case ErrorKind::MissingSingularityData: return "MissingSingularityData";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::NegativeDefect: return "NegativeDefect";
    case ErrorKind::NegativeWindPi: return "NegativeWindPi";
    case ErrorKind::UnsupportedCover: return "UnsupportedCover";
    case ErrorKind::NotAPlane: return "NotAPlane";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::BudgetViolation: return "BudgetViolation";
    case ErrorKind::ParityArithmeticError: return "ParityArithmeticError";
    case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorKind::NotOnSphere: return "NotOnSphere";
    case ErrorKind::ResonanceSuspected: return "ResonanceSuspected";
    case ErrorKind::DegenerateOrbit: return "DegenerateOrbit";
    case ErrorKind::NotInvariant: return "NotInvariant";
  }
  return "UnknownError";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ReferenceError:
    case ErrorKind::UnknownCommand:
    case ErrorKind::InvalidInput:
      return true;
    default:
      return false;
  }
}

}  // namespace sftkit
