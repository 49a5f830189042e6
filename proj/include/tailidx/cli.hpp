#ifndef TAILIDX_CLI_HPP
#define TAILIDX_CLI_HPP

#include <ostream>

namespace tailidx {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;       // bad flags, unreadable or malformed input
inline constexpr int kExitDomain = 3;      // precondition violation
inline constexpr int kExitDegenerate = 4;  // pipeline degeneracy

// Entry point of the `tailidx` tool. Data goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tailidx

#endif  // TAILIDX_CLI_HPP
