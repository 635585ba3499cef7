#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace genbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;    // validation, format, IO and usage errors
inline constexpr int kExitNumerical = 2;

/// Runs one command line. `args` excludes the program name. Results go to
/// `out` (or to --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace genbench::cli
