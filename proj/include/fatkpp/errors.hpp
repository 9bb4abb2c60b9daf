#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fatkpp {

enum class ErrorKind {
  InvalidParams,
  NonIntegrableTail,
  DomainError,
  GridMismatch,
  NoConvergence,
  StabilityViolation,
  BoundaryContamination,
  OutOfDomain,
  NotMutationEligible,
  GridTooCoarse,
  GradientOutOfRange,
  CFLViolation,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above; the
/// CLI maps kinds onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace fatkpp
