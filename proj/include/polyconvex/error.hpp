#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyconvex {

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  NotLagrangian,
  DegenerateFrame,
  NotInPencil,
  ThetaOutOfRange,
  HypothesisViolated,
  DisjointnessViolated,
  Degenerate,
  NotOnVariety,
  IllConditioned,
  ConfigInvalid,
  IoFailure,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotLagrangian: return "NotLagrangian";
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::NotInPencil: return "NotInPencil";
    case ErrorKind::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::DisjointnessViolated: return "DisjointnessViolated";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NotOnVariety: return "NotOnVariety";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind so
/// the CLI can map it onto the report and the exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace polyconvex
