#pragma once

#include <stdexcept>
#include <string>

namespace agres {

enum class ErrorKind {
  DomainError,
  DepthExceeded,
  OrbitOverflow,
  CapExceeded,
  Disconnected,
  SingularInterior,
  NegativeConductance,
  BadTarget,
  MismatchedVertexSets,
  BadMeasure,
  IdentificationMismatch,
  NoConvergence,
  DegenerateLimit,
  BracketFailure,
  GuardExceeded,
  RangeViolation,
  BadWeights,
  UnknownVertex,
  InsufficientScales,
  TrackingError,
  ParseError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// that front ends can map it onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of an iterative numerical procedure, as opposed to
  /// invalid input.
  bool is_numerical() const noexcept;

 private:
  ErrorKind kind_;
};

}  // namespace agres
