#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dissip {

enum class ErrorKind {
  InvalidArgument,
  NonPositivePhi,
  NotIncreasing,
  BracketFailure,
  NonConvergent,
  QuadratureFailure,
  BadTruncation,
  EllipticityViolation,
  BudgetExhausted,
  NotStrict,
  SolverDiverged,
  NotIntegrable,
  OrliczNormFailure,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the toolkit carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositivePhi: return "NonPositivePhi";
    case ErrorKind::NotIncreasing: return "NotIncreasing";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::BadTruncation: return "BadTruncation";
    case ErrorKind::EllipticityViolation: return "EllipticityViolation";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::NotStrict: return "NotStrict";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::NotIntegrable: return "NotIntegrable";
    case ErrorKind::OrliczNormFailure: return "OrliczNormFailure";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace dissip
