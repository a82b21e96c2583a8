#include "cmcbr/error.hpp"

namespace cmcbr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::NonFiniteField: return "NonFiniteField";
    case ErrorKind::NonPositiveMetric: return "NonPositiveMetric";
    case ErrorKind::NonPositiveLapse: return "NonPositiveLapse";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::DegenerateZeroOrderTerm: return "DegenerateZeroOrderTerm";
    case ErrorKind::BoundViolation: return "BoundViolation";
    case ErrorKind::InvalidKasner: return "InvalidKasner";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::CmcDriftExceeded: return "CmcDriftExceeded";
    case ErrorKind::StabilityBoundExceeded: return "StabilityBoundExceeded";
    case ErrorKind::EmptyHistory: return "EmptyHistory";
    case ErrorKind::SinkError: return "SinkError";
    case ErrorKind::SnapshotFormat: return "SnapshotFormat";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace cmcbr
