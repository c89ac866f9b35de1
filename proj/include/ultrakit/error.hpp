#pragma once

#include <stdexcept>
#include <string>

namespace ultrakit {

enum class ErrorKind {
  QueryOutsideAlgebra,
  CarrierMismatch,
  UnsupportedEncoding,
  EmptyLargeFiber,
  NotAnUltrafilterMap,
  InvalidFamily,
  NotClosedUnderUnion,
  NotClosedUnderIntersection,
  MissingEmptyOrFull,
  NotContinuous,
  UnboundedFibers,
  TypeMismatch,
  UnsupportedUltrafilter,
  FunctorialityViolation,
  InvalidCategory,
  InvalidGroupoid,
  ParseError,
  BoundExceeded,
  // Internal invariant violations. These indicate a bug, never bad input.
  TheoremMismatch,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::QueryOutsideAlgebra: return "QueryOutsideAlgebra";
    case ErrorKind::CarrierMismatch: return "CarrierMismatch";
    case ErrorKind::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorKind::EmptyLargeFiber: return "EmptyLargeFiber";
    case ErrorKind::NotAnUltrafilterMap: return "NotAnUltrafilterMap";
    case ErrorKind::InvalidFamily: return "InvalidFamily";
    case ErrorKind::NotClosedUnderUnion: return "NotClosedUnderUnion";
    case ErrorKind::NotClosedUnderIntersection: return "NotClosedUnderIntersection";
    case ErrorKind::MissingEmptyOrFull: return "MissingEmptyOrFull";
    case ErrorKind::NotContinuous: return "NotContinuous";
    case ErrorKind::UnboundedFibers: return "UnboundedFibers";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::UnsupportedUltrafilter: return "UnsupportedUltrafilter";
    case ErrorKind::FunctorialityViolation: return "FunctorialityViolation";
    case ErrorKind::InvalidCategory: return "InvalidCategory";
    case ErrorKind::InvalidGroupoid: return "InvalidGroupoid";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::BoundExceeded: return "BoundExceeded";
    case ErrorKind::TheoremMismatch: return "TheoremMismatch";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable kind. `what()` is "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) { throw Error(kind, detail); }

inline void require(bool condition, ErrorKind kind, const std::string& detail) {
  if (!condition) fail(kind, detail);
}

}  // namespace ultrakit
