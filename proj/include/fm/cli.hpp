#pragma once

#include <iosfwd>

namespace fm {

/// Entry point of the `fm` command-line tool.
///
/// Parses `argv`, runs the requested subcommand, and writes results to
/// `out` and diagnostics to `err`. Returns the process exit code:
///   0  success with a positive verdict
///   1  negative verdict (invalid configuration, void model, dead
///      features found, propagation conflict)
///   2  usage, file, or parse error
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace fm
