#include "vvc/error.hpp"

namespace vvc {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SingularOperatingPoint: return "SingularOperatingPoint";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TapOutOfRange: return "TapOutOfRange";
    case ErrorCode::ActionOutOfRange: return "ActionOutOfRange";
    case ErrorCode::UnknownProfile: return "UnknownProfile";
    case ErrorCode::EpisodeOver: return "EpisodeOver";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::UnknownSystem: return "UnknownSystem";
    case ErrorCode::MalformedScale: return "MalformedScale";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::CircuitLoadError: return "CircuitLoadError";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace vvc
