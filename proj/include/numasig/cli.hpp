#pragma once

#include <iosfwd>

#include "numasig/evaluation.hpp"

namespace numasig::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationFailed = 1,
    kInputError = 2,
    kFitWarning = 3,
};

/// Seams for tests; the defaults are the real implementations.
struct Hooks {
    Extractor extractor;
};

/// Runs the `numasig` command line and returns its exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

}  // namespace numasig::cli
