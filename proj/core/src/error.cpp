#include "isb/error.hpp"

namespace isb {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnreadableSource: return "UnreadableSource";
    case ErrorCode::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::DegenerateOutput: return "DegenerateOutput";
    case ErrorCode::BadRatios: return "BadRatios";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::IdenticalInputs: return "IdenticalInputs";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace isb
