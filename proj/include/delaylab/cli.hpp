#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "delaylab/types.hpp"

namespace delaylab::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kUsageError = 2 };

/// Parses "RE", "RE+IMj", "RE-IMj" or "IMj".
Complex parse_complex(const std::string& text);

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace delaylab::cli
