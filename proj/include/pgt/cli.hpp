#pragma once

#include <iosfwd>

namespace pgt {

/// Entry point of the `pgt` tool. Returns the process exit code; usage
/// errors print the help text to `err` and return nonzero.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pgt
