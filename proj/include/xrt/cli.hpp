#pragma once

#include "xrt/error.hpp"

#include <iosfwd>

namespace xrt::cli {

enum Exit : int {
    kOk = 0,
    kPrecondition = 2,
    kNetwork = 3,
    kCorrupt = 4,
    kMalformed = 5,
    kCancelled = 6,
};

int exit_code_for(ErrorCode code) noexcept;

/// Runs one command. Installs a SIGINT handler for the duration so an
/// interrupted download is cancelled cleanly.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace xrt::cli
