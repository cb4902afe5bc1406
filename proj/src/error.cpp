#include "ukhlab/error.hpp"

namespace ukh {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::DegreeViolation: return "degree-violation";
    case ErrorCode::Contradiction: return "contradiction";
  }
  return "unknown";
}

}  // namespace ukh
