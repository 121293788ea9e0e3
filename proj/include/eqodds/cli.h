#ifndef EQODDS_CLI_H_
#define EQODDS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace eqodds {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

// Runs one `eqodds` command line in-process. args[0] is the program name.
// Reports and summaries go to `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eqodds

#endif  // EQODDS_CLI_H_
