#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "isb/error.hpp"

namespace isb::cli {

/// Runs the isb command line on args (without the program name); returns the
/// process exit code.
///   0 success, 1 other failure, 2 bad input or usage, 3 checkpoint errors,
///   4 non-finite loss.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int exit_code_for(ErrorCode code) noexcept;

}  // namespace isb::cli
