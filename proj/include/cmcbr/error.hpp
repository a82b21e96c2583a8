#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmcbr {

enum class ErrorKind {
  InvalidGrid,
  NonFiniteField,
  NonPositiveMetric,
  NonPositiveLapse,
  SolverDiverged,
  DegenerateZeroOrderTerm,
  BoundViolation,
  InvalidKasner,
  InvalidArgument,
  CmcDriftExceeded,
  StabilityBoundExceeded,
  EmptyHistory,
  SinkError,
  SnapshotFormat,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace cmcbr
