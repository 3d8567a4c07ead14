#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bmd/delay.hpp"
#include "bmd/estimator.hpp"
#include "bmd/game.hpp"
#include "bmd/mirror.hpp"
#include "bmd/schedules.hpp"

namespace bmd {

struct RunConfig {
  const Game* game = nullptr;
  DelayModel delay;
  ScheduleParams schedule;
  std::int64_t horizon = 1000;
  std::uint64_t seed = 1;
  int replications = 1;
  std::int64_t stride = 1;
  EstimatorKind estimator = EstimatorKind::Residual;
  MirrorStructure mirror = MirrorStructure::euclidean();
  std::optional<Vector> initial;     // X_1; ball centers when absent
  std::optional<Vector> x_star;      // enables rel_dist
  std::optional<double> phi_star;    // enables potential_gap (needs a potential)
  std::int64_t ghat_burn_in = 100;   // iterations excluded from max_ghat_after_burn_in
  ProjectionOptions projection;
};

/// One logged iteration. Missing metrics are NaN.
struct TraceRow {
  std::int64_t iteration = 0;
  double rel_dist = 0.0;       // ||X_hat_k - x*|| / ||x*||
  double potential_gap = 0.0;  // Phi(X_hat_k) - Phi*
  double ghat_norm = 0.0;      // ||G_hat_k|| over all players
  int starved_players = 0;
  double wall_ms = 0.0;        // since the start of the run
};

struct RunStats {
  std::vector<std::int64_t> starvation;  // K_empty(K) per player
  std::vector<std::int64_t> max_lag;     // max k - s(k) over non-sentinel pops
  std::vector<std::size_t> cache_left;   // |P_J| at the end
  std::vector<std::size_t> queue_left;   // |P_G| at the end
  std::vector<std::size_t> in_flight;    // undelivered feedback at the end
  double max_ghat_norm = 0.0;
  double max_ghat_after_burn_in = 0.0;
  Vector final_x;
  Vector final_x_hat;
};

/// State exposed to an observer after the update of iteration k.
struct IterationView {
  std::int64_t k = 0;
  std::span<const double> x;      // X_k
  std::span<const double> x_next; // X_{k+1}
  std::span<const double> x_hat;  // X_hat_k
  std::span<const double> ghat;   // G_hat_k
  std::span<const std::int64_t> popped;  // s^i(k); 0 for a sentinel
  double gamma = 0.0;
};
using Observer = std::function<void(const IterationView&)>;

struct RunResult {
  std::vector<TraceRow> trace;
  RunStats stats;
};

/// Throws ConfigError when the run configuration is unusable: missing
/// game, horizon < 2, stride < 1, delta_1 above the smallest ball radius,
/// an infeasible X_1, or an x* of the wrong size.
void check_run_config(const RunConfig& cfg);

/// One run of the delayed bandit learning loop, deterministic in
/// (cfg, cfg.seed) apart from wall_ms.
RunResult run(const RunConfig& cfg, const Observer& observer = {});

/// Per logged iteration: median and quartiles of each metric across runs.
struct AggregateRow {
  std::int64_t iteration = 0;
  struct Band {
    double q25 = 0.0, median = 0.0, q75 = 0.0;
  };
  Band rel_dist, potential_gap, ghat_norm, starved_players;
};

struct ReplicateResult {
  std::vector<RunResult> runs;  // runs[r] used seed + r
  std::vector<AggregateRow> aggregate;
};

/// Linear-interpolation quantile of unsorted data; NaN if any value is NaN.
double quantile(std::vector<double> values, double q);

/// cfg.replications runs with seeds cfg.seed + r. Runs may execute on up to
/// `threads` threads; results are merged by replication index.
ReplicateResult replicate(const RunConfig& cfg, unsigned threads = 1);

}  // namespace bmd
