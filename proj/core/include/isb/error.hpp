#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isb {

// Every failure the toolkit reports carries one of these classes. The CLI maps
// them to exit codes and prefixes messages with the class name.
enum class ErrorCode {
  UnreadableSource,
  InconsistentDimensions,
  DegenerateOutput,
  BadRatios,
  EmptyCorpus,
  BadIndex,
  DimensionMismatch,
  ConfigMismatch,
  InvalidConfig,
  EmptySequence,
  IdenticalInputs,
  TooSmall,
  NonFiniteLoss,
  VersionMismatch,
  ShapeMismatch,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace isb
