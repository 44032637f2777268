#ifndef GRADBENCH_TOOLS_CLI_HPP
#define GRADBENCH_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace gradbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gradbench::cli

#endif
