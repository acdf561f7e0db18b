#ifndef DNE_COMMANDS_HPP
#define DNE_COMMANDS_HPP

#include "dne/harness.hpp"
#include "dne/scenario.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace dne {

enum class Command { SolveElliptic, Evolve, Stationary, Verify, Sweep };

/// Accepts solve-elliptic, evolve, stationary, verify, sweep; throws ParseError otherwise.
Command parse_command(std::string_view name);
std::string_view to_string(Command command);

/// Process exit codes of `run_command`.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitSolverFailure = 2;

/// Check names accepted by `verify`, plus the group names "default",
/// "trajectory" and "all".
std::vector<std::string> available_checks();
/// Pointwise and single-solve checks; the trajectory checks are opt-in.
std::vector<std::string> default_suite();

/// Runs the named checks (or groups) on a scenario. Unknown names throw
/// ParseError. Checks that do not apply to the scenario (source_monotonicity
/// without a source, lambda_scaling with variable p, monotone with a
/// time-dependent potential) are skipped.
std::vector<CheckReport> run_verify(const Scenario& scenario, const std::vector<std::string>& names);

struct CommandOptions {
  std::vector<std::string> checks; // verify only; empty selects default_suite()
  std::ostream* log = nullptr;     // progress lines, if set
};

/// Executes one command and writes its outputs (CSV fields, JSON manifest)
/// into `out_dir`. Returns kExitSuccess, kExitCheckFailure or
/// kExitSolverFailure. I/O failures raise IoError.
int run_command(Command command, const Scenario& scenario, const std::filesystem::path& out_dir,
                const CommandOptions& options = {});

} // namespace dne

#endif
