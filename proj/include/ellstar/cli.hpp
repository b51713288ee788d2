#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ellstar {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

/// Entry point of the command-line tool. Subcommands:
///   solve | shoot | evolve | sweep | verify
/// Options: --config <path>, --out <dir>, --seed <u64>, --resolution-factor <int>.
/// Returns 0 on success, 1 on numerical failure, 2 on configuration errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace ellstar
