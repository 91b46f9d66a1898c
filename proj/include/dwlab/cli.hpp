#pragma once

// Command-line front-end. Subcommands: scan, spectrum, scaling, semiclassical.
// Exit status 0 on success, 2 on usage errors, 3 on numerical failure.

namespace dwlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

int run(int argc, char** argv);

}  // namespace dwlab::cli
