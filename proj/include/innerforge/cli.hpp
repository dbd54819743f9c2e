#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace innerforge {

/// Runs one subcommand. args excludes the program name. Returns the exit
/// code: 0 success, 2 validation or hypothesis failure, 3 density-gate
/// refusal, 4 numeric accuracy failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace innerforge
