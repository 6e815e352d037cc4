#pragma once

#include <iosfwd>

namespace tnm {

// Exit codes of the `tnm` command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;  // invalid model, unknown name, busy port
inline constexpr int kExitUsage = 2;   // bad arguments or unreadable files

// Entry point of the `tnm` command with its streams injected.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tnm
