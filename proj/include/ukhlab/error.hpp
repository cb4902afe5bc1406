#pragma once

#include <stdexcept>
#include <string>

namespace ukh {

enum class ErrorCode {
  InvalidInput,
  NumericalFailure,
  Unsupported,
  DegreeViolation,
  Contradiction,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library. The C API maps `code()` onto status
// values; the CLI maps those onto exit codes.
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

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorCode::InvalidInput, what);
}

}  // namespace ukh
