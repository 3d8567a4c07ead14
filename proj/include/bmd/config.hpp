#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bmd/runner.hpp"

namespace bmd {

/// A parsed experiment file. See README.md for the schema.
struct ExperimentConfig {
  std::string name;       // scenario name; empty for the base document
  std::string game_kind;  // "quadratic" or "thermal"
  std::shared_ptr<const Game> game;
  DelayModel delay;
  ScheduleParams schedule;
  std::int64_t horizon = 1000;
  std::int64_t stride = 1;
  std::uint64_t seed = 1;
  int replications = 1;
  unsigned threads = 1;
  EstimatorKind estimator = EstimatorKind::Residual;
  MirrorStructure mirror = MirrorStructure::euclidean();
  std::optional<Vector> initial;
  std::filesystem::path trace_path;   // output.trace
  std::filesystem::path oracle_path;  // output.oracle
  double oracle_tol = 1e-10;
  int oracle_max_iter = 200000;
  std::vector<ExperimentConfig> scenarios;
  bool has_scenarios = false;

  /// Run configuration without oracle quantities.
  RunConfig run_config() const;
};

constexpr int kSchemaVersion = 1;

/// Throws ConfigError with the line and column of syntax errors, the key
/// path of type errors, and the name of any unknown key.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

std::string_view estimator_name(EstimatorKind k);
/// "residual" or "single_point"; ConfigError otherwise.
EstimatorKind parse_estimator(std::string_view s);

}  // namespace bmd
