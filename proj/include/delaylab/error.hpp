#pragma once

#include <stdexcept>
#include <string>

namespace delaylab {

enum class ErrorCode {
  NotHermitian,
  NonFinite,
  RankDeficient,
  DimensionMismatch,
  IndexOutOfRange,
  InvalidRange,
  OutOfRegime,
  InvalidParams,
  OutOfBudget,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::OutOfRegime: return "OutOfRegime";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::OutOfBudget: return "OutOfBudget";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace delaylab
