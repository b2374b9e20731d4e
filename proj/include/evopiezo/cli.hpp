// SPDX-License-Identifier: Apache-2.0
// Command-line front end: check / simulate / reduce over a parsed config.
#ifndef EVOPIEZO_CLI_HPP
#define EVOPIEZO_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "evopiezo/config.hpp"

namespace evopiezo {

// process exit codes, stable across releases
inline constexpr int kExitSuccess = 0;       // certified / run completed
inline constexpr int kExitInput = 1;         // config, format, or usage error
inline constexpr int kExitFalsified = 2;     // a solvability hypothesis provably fails
inline constexpr int kExitInconclusive = 3;  // search exhausted without a certificate
inline constexpr int kExitSolver = 4;        // linear solver or time loop failure

struct CliOptions {
  double nu_cap = 1073741824.0;        // 2^30, upper end of the doubling search
  std::optional<double> tol;           // certification threshold override
  bool skip_check = false;             // run without the solvability gate
  std::optional<std::string> out_dir;  // where report/log/snapshots land
};

// Each command writes its primary report to `out` and diagnostics to `err`,
// returning one of the exit codes above.  Filesystem side effects happen
// only under opt.out_dir.
int cmd_check(const SimulationSpec& spec, const CliOptions& opt, std::ostream& out,
              std::ostream& err);
int cmd_simulate(const SimulationSpec& spec, const CliOptions& opt, std::ostream& out,
                 std::ostream& err);
int cmd_reduce(const SimulationSpec& spec, const CliOptions& opt, std::ostream& out,
               std::ostream& err);

// argv-level entry point used by the binary and the CLI tests
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace evopiezo

#endif
