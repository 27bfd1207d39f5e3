#pragma once

#include <ostream>

namespace tlre::cli {

/// Entry point of the `tlre` tool. Returns the process exit code; diagnostics
/// go to `err`, progress and reports to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tlre::cli
