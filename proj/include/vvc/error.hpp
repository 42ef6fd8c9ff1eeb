#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vvc {

enum class ErrorCode {
  SyntaxError,
  ValidationError,
  InvalidParameter,
  NotConverged,
  SingularOperatingPoint,
  DimensionMismatch,
  TapOutOfRange,
  ActionOutOfRange,
  UnknownProfile,
  EpisodeOver,
  InvalidAction,
  KeyMismatch,
  UnknownSystem,
  MalformedScale,
  DuplicateName,
  InvalidSpec,
  CircuitLoadError,
  ProtocolError,
  IoError,
};

// Stable name used in diagnostics and in protocol error frames.
std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vvc
