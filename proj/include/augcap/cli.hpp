#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace augcap::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kUsage = 2;  // bad flags, missing files, config conflicts
inline constexpr int kData = 3;
inline constexpr int kRemote = 4;
inline constexpr int kVerificationFailed = 5;

// Runs one subcommand. `args` excludes the program name. Data goes to files; the
// report table goes to `out`; logs and errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace augcap::cli
