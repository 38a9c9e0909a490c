// casefile - offline artifact analysis workbench
// Command-line front end, callable in-process for tests.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace casefile {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int io = 2;
inline constexpr int failure = 3;
} // namespace exit_code

struct CliEnvironment {
    bool color = false; ///< ANSI severity colors in text output
};

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliEnvironment& env = {});

} // namespace casefile
