#pragma once

#include <stdexcept>
#include <string>

namespace poa {

enum class ErrorKind {
  InvalidNetwork,
  InvalidCost,
  InvalidArgument,
  NegativeLoad,
  NoPath,
  PathExplosion,
  NonConvergence,
  SupportSearchExhausted,
  BisectionFailure,
  DegenerateSegment,
  SignViolation,
  ClassificationConflict,
  GridExceedsBreakpointMax,
  TooManyPaths,
};

// Coarse grouping used for process exit codes.
enum class ErrorCategory { Input, Solver, Contract };

const char* to_string(ErrorKind kind);
ErrorCategory category_of(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace poa
