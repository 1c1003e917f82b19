#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ecotab {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int input = 2;
inline constexpr int budget = 3;
inline constexpr int identification = 4;
inline constexpr int convergence = 5;
}  // namespace exit_code

// Command-line front end; args exclude the program name. Results go to out,
// diagnostics to err; the return value is the process exit code.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ecotab
