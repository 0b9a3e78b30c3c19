#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cfnet {

inline constexpr const char* kToolName = "cfnet";
inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line (without the program name). Results go to `out` or
/// to the --out file; diagnostics go to `err`.
/// Exit codes: 0 success, 1 domain error (structured error JSON on `out`),
/// 2 usage error or unreadable input file.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfnet
