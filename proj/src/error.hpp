#pragma once

#include <stdexcept>
#include <string>

namespace matchmarket {

enum class ErrorCode {
  InvalidParameter,     // distribution / correlation parameters out of range
  InvalidInput,         // malformed data (length mismatch, zero variance, bad CSV)
  InvalidRule,          // utility rule incompatible with the table
  Domain,               // argument outside a function's domain
  DegenerateVariance,   // normal extreme statistics with v <= 0
  ApproximationDomain,  // closed-form approximation used outside its validity range
  InvalidConfig,        // experiment configuration rejected
  Io,                   // file could not be read or written
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid parameter";
    case ErrorCode::InvalidInput: return "invalid input";
    case ErrorCode::InvalidRule: return "invalid rule";
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::DegenerateVariance: return "degenerate variance";
    case ErrorCode::ApproximationDomain: return "approximation domain";
    case ErrorCode::InvalidConfig: return "invalid config";
    case ErrorCode::Io: return "I/O error";
  }
  return "unknown";
}

}  // namespace matchmarket
