#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rangecap {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitValidation = 2,
    kExitResource = 3,
    kExitAssertion = 4,
};

/// Runs the tool on argv-style arguments (args[0] is the program name).
/// Reports go to `out` when no --out directory is given; diagnostics go to
/// `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1,2,5" and inclusive ranges "1..20", mixed freely.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::vector<std::uint64_t> parse_grid(std::string_view text);

}  // namespace rangecap
