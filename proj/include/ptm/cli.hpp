#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ptm {

/// Full command-line front end, runnable in-process (tests drive it without
/// spawning binaries). `args` excludes the program name. Returns the process
/// exit code:
///   0 success
///   1 unexpected error, or a benchmark with failed cells / failed invariants
///   2 invalid configuration or command line
///   3 I/O or input-parse failure
///   4 broken internal precondition
/// Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ptm
