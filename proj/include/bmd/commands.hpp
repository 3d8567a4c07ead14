#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bmd/config.hpp"
#include "bmd/oracle.hpp"

namespace bmd {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitConfig = 2, kExitNumerical = 3 };

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<EstimatorKind> estimator;
  bool strict = false;
};

inline constexpr const char* kTraceHeader = "run_id,iteration,rel_dist,potential_gap,ghat_norm,starved_players,wall_ms";

/// %.17g formatting; "nan" for any NaN.
std::string format_double(double v);

void write_trace_csv(std::ostream& out, const ReplicateResult& result);
void write_oracle_json(std::ostream& out, const std::string& game_kind, const OracleResult& r, double tol);

struct OracleFile {
  Vector x_star;
  std::optional<double> potential;
};
/// Throws ConfigError on a malformed file.
OracleFile read_oracle_file(const std::filesystem::path& path);

int cmd_validate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oracle(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line entry point: parses arguments, dispatches, and maps
/// exceptions to exit codes.
int run_cli(int argc, char** argv);

}  // namespace bmd
