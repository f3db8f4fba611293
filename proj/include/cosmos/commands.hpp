#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "cosmos/dynamics.hpp"

namespace cosmos {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitMismatch = 1,
  kExitUsage = 2,
  kExitDiverged = 3,
  kExitConservation = 4,
};

/// Environment variable that overrides the configured seed.
inline constexpr const char* kSeedEnv = "COSMOS_SEED";

/// Geometry report. Exit 0 iff every expected verdict holds.
int cmd_verify(double tolerance, std::ostream& out, std::ostream& err);

/// Balanced reactions as CSV, to `out_path` or to `out` when empty.
int cmd_reactions(int max_coefficient, const std::string& out_path, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::string config_path;
  std::int64_t steps = 0;
  std::string out_path;
  /// Defaults to out_path + ".manifest.json".
  std::string manifest_path;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

struct AuditOptions {
  std::string config_path;
  std::int64_t steps = 0;
  std::optional<std::uint64_t> seed;
  /// Test hook: runs after each step, before the ledger is recounted.
  StepObserver tamper;
};

int cmd_audit(const AuditOptions& options, std::ostream& out, std::ostream& err);

/// Seed precedence: explicit flag, then the environment, then the config.
/// Throws ConfigInvalid on an unparsable environment value.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t configured);

}  // namespace cosmos
