#pragma once

#include <iosfwd>

namespace mentor::cli {

/// Entry point of the `mentor` command line; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mentor::cli
