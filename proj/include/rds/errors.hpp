#pragma once

#include <stdexcept>
#include <string>

namespace rds {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Domain,
  NoDensity,
  NotConverged,
  Unsupported,
  InsufficientSamples,
  Overflow,
  Io,
  AnalysisFailed,
  Internal,
};

/// Library-wide exception type. Carries a coarse code so the C API can map
/// failures onto stable integer status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rds
