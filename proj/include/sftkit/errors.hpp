#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sftkit {

// Every failure the library reports carries one of these kinds. The CLI maps
// input-side kinds to exit code 2 and everything else to exit code 1.
enum class ErrorKind {
  // input / usage
  ParseError,
  ReferenceError,
  UnknownCommand,
  InvalidInput,
  // orbits
  DegenerateCover,
  // spectrum oracle
  DegenerateOperator,
  ZeroCrossing,
  InsufficientWindow,
  // curves
  MissingSpectralData,
  MissingSingularityData,
  InternalInconsistency,
  NegativeDefect,
  NegativeWindPi,
  UnsupportedCover,
  NotAPlane,
  IndexOutOfRange,
  // buildings
  BudgetViolation,
  ParityArithmeticError,
  SearchBudgetExceeded,
  // reeb dynamics
  NotOnSphere,
  ResonanceSuspected,
  DegenerateOrbit,
  NotInvariant,
};

std::string_view to_string(ErrorKind kind);

// True for kinds caused by malformed input rather than by a violated invariant.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace sftkit
