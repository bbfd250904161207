#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace latent_reach::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation or domain failure
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. Machine output goes to `out` as JSON, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace latent_reach::cli
