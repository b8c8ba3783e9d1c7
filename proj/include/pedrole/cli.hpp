#pragma once

#include <ostream>

namespace pedrole {

/// Exit codes returned by run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitInternal = 4;

/// Entry point of the `pedrole` tool. Writes a one-line summary to `out`
/// and diagnostics to `err`; all artifacts go to files under --out.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pedrole
