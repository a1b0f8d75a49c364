#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tubeint {

enum class ErrorKind {
  NonPositive,
  InconsistentEpsilon,
  InvalidArgument,
  NonFinite,
  PositivityViolation,
  PositivityViolationW,
  Escape,
  NonPositiveY,
  NonPositiveW,
  NonPositiveF,
  UnsupportedOmega,
  InsufficientSamples,
  InsufficientWindows,
  OutOfRange,
  MissingInput,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::InconsistentEpsilon: return "InconsistentEpsilon";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::PositivityViolation: return "PositivityViolation";
    case ErrorKind::PositivityViolationW: return "PositivityViolationW";
    case ErrorKind::Escape: return "Escape";
    case ErrorKind::NonPositiveY: return "NonPositiveY";
    case ErrorKind::NonPositiveW: return "NonPositiveW";
    case ErrorKind::NonPositiveF: return "NonPositiveF";
    case ErrorKind::UnsupportedOmega: return "UnsupportedOmega";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::InsufficientWindows: return "InsufficientWindows";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::MissingInput: return "MissingInput";
  }
  return "Unknown";
}

/// True for errors raised by the numerical core (CLI exit code 3); everything
/// else is an input problem (exit code 2).
constexpr bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite:
    case ErrorKind::PositivityViolation:
    case ErrorKind::PositivityViolationW:
    case ErrorKind::Escape:
    case ErrorKind::NonPositiveY:
    case ErrorKind::NonPositiveW:
    case ErrorKind::NonPositiveF:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<double> at = std::nullopt)
      : std::runtime_error(format(kind, what, at)), kind_(kind), at_(at) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Time (t or tau) at which a numerical failure was detected, if any.
  std::optional<double> at() const noexcept { return at_; }

 private:
  static std::string format(ErrorKind kind, const std::string& what, std::optional<double> at) {
    std::string msg{to_string(kind)};
    if (at) msg += "(" + std::to_string(*at) + ")";
    if (!what.empty()) msg += ": " + what;
    return msg;
  }

  ErrorKind kind_;
  std::optional<double> at_;
};

inline void require_finite(double value, std::string_view name) {
  if (!std::isfinite(value)) throw Error(ErrorKind::NonFinite, std::string(name) + " is not finite");
}

}  // namespace tubeint
