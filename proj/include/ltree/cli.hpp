#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ltree {

/// Process exit codes of the ltree tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitData = 3,
    kExitNumerical = 4,
};

/// Seed used when --seed is absent: $LTREE_SEED if set, else 1.
std::uint64_t default_seed();

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out` unless written to files; messages go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ltree
