#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qho/error.hpp"

namespace qho::cli {

enum Exit : int {
  kOk = 0,
  kVerificationFailure = 1,
  kDomainError = 2,
  kConstraintViolation = 3,
  kUsage = 64,
};

int exit_code_for(ErrorCode code);

/// Runs the command line `args` (without the program name). Tabular output
/// goes to --out (default `out`); JSON summaries go to --report, defaulting to
/// `out` when --out names a file and to `err` otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qho::cli
