#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankvar::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kData = 3;
inline constexpr int kResource = 4;

// Runs one CLI invocation. args excludes the program name. The structured report goes to
// --out (or `out` when --out is absent); diagnostics go to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankvar::cli
