#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qss::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kAborted = 2;  // only with --fail-on-abort

// Runs the command line `args` (args[0] is the program name). Results go to
// `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Markdown page listing every config-file key with its default.
std::string config_reference();

// Worker count for sweeps: QSS_SIM_THREADS if set and positive, else the
// hardware concurrency.
unsigned worker_threads();

}  // namespace qss::cli
