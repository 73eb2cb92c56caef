#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tmon::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kFalse = 1, kBadInput = 2 };

/// Runs one subcommand. args excludes the program name. The report goes to
/// --out when given, else to out; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tmon::cli
