#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace schurlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitStatisticalGuard = 3;

/// Runs one command line (without the program name). Data goes to `out`
/// unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace schurlab::cli
