#pragma once

#include <istream>
#include <ostream>

namespace ran {

/// Runs the `ran` command line. Returns 0 on success, 1 on domain errors, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace ran
