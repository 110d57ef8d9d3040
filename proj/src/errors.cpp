#include "agres/errors.hpp"

namespace agres {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::OrbitOverflow: return "OrbitOverflow";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::SingularInterior: return "SingularInterior";
    case ErrorKind::NegativeConductance: return "NegativeConductance";
    case ErrorKind::BadTarget: return "BadTarget";
    case ErrorKind::MismatchedVertexSets: return "MismatchedVertexSets";
    case ErrorKind::BadMeasure: return "BadMeasure";
    case ErrorKind::IdentificationMismatch: return "IdentificationMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateLimit: return "DegenerateLimit";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::GuardExceeded: return "GuardExceeded";
    case ErrorKind::RangeViolation: return "RangeViolation";
    case ErrorKind::BadWeights: return "BadWeights";
    case ErrorKind::UnknownVertex: return "UnknownVertex";
    case ErrorKind::InsufficientScales: return "InsufficientScales";
    case ErrorKind::TrackingError: return "TrackingError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

bool Error::is_numerical() const noexcept {
  switch (kind_) {
    case ErrorKind::NoConvergence:
    case ErrorKind::DegenerateLimit:
    case ErrorKind::BracketFailure:
    case ErrorKind::SingularInterior:
    case ErrorKind::NegativeConductance:
    case ErrorKind::RangeViolation:
    case ErrorKind::DepthExceeded:
      return true;
    default:
      return false;
  }
}

}  // namespace agres
