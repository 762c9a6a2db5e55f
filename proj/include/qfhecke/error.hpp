#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qfhecke {

// Stable machine-readable error codes. The CLI prints code_name() verbatim,
// so renaming an enumerator is a breaking change.
enum class ErrorCode {
  InvalidArgument,
  NotSquarefree,
  DegreeUnsupported,
  FieldMismatch,
  ZeroIdeal,
  ZeroArgument,
  NotPrime,
  NotIdeal,
  ModulusZero,
  EnumerationTooLarge,
  PreconditionViolation,
  IllDefinedExponent,
  NoDensity,
  UnboundedRegion,
  ParityMismatch,
  RamanujanViolation,
  NotNarrowSquare,
  DivisibilityViolation,
  EmptyDataset,
  ZeroMassRegion,
  DivergentExponent,
  ZeroModulus,
  NetworkError,
  SchemaError,
  CacheMiss,
  MissingEigenvalue,
  TotalWeightZero,
  UnsupportedFormat,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSquarefree: return "NotSquarefree";
    case ErrorCode::DegreeUnsupported: return "DegreeUnsupported";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::ZeroIdeal: return "ZeroIdeal";
    case ErrorCode::ZeroArgument: return "ZeroArgument";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::NotIdeal: return "NotIdeal";
    case ErrorCode::ModulusZero: return "ModulusZero";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::IllDefinedExponent: return "IllDefinedExponent";
    case ErrorCode::NoDensity: return "NoDensity";
    case ErrorCode::UnboundedRegion: return "UnboundedRegion";
    case ErrorCode::ParityMismatch: return "ParityMismatch";
    case ErrorCode::RamanujanViolation: return "RamanujanViolation";
    case ErrorCode::NotNarrowSquare: return "NotNarrowSquare";
    case ErrorCode::DivisibilityViolation: return "DivisibilityViolation";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ZeroMassRegion: return "ZeroMassRegion";
    case ErrorCode::DivergentExponent: return "DivergentExponent";
    case ErrorCode::ZeroModulus: return "ZeroModulus";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::CacheMiss: return "CacheMiss";
    case ErrorCode::MissingEigenvalue: return "MissingEigenvalue";
    case ErrorCode::TotalWeightZero: return "TotalWeightZero";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace qfhecke
