#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fxrca::cli {

inline constexpr const char* kVersion = "0.1.0";

// Runs one command line (without the program name). Returns 0 on success,
// 2 for input or configuration errors and 3 for estimation failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fxrca::cli
