/*
 * cli.hpp: the urnbound command line.
 *
 *     urnbound <spectrum|simulate|decompose|bound|verify|sweep> --config PATH
 *              [--seed U64] [--out DIR] [--threads N] [--format csv|json]
 *
 * Exit codes: 0 success, 1 bad arguments or config, 2 unusable matrix
 * (reducible, complex spectrum, unsupported Jordan structure), 3 a bound
 * failed to dominate in verify or sweep.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace urnbound::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitMatrix = 2;
inline constexpr int kExitDominance = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace urnbound::cli
