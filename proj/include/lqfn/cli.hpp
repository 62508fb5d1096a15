// cli.hpp: command dispatch for the lqfn tool. run_cli is the whole program
// minus process setup, so tests can drive it in-process.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lqfn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitUsage = 64;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lqfn
