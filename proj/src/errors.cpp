#include "fatkpp/errors.hpp"

namespace fatkpp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NonIntegrableTail: return "NonIntegrableTail";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::StabilityViolation: return "StabilityViolation";
    case ErrorKind::BoundaryContamination: return "BoundaryContamination";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NotMutationEligible: return "NotMutationEligible";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GradientOutOfRange: return "GradientOutOfRange";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace fatkpp
