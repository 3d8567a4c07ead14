#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "bmd/estimator.hpp"
#include "bmd/rng.hpp"
#include "bmd/types.hpp"

namespace bmd {

enum class DelayKind { HeterogeneousBounded, HomogeneousSublinear };
enum class DelayMode { Deterministic, UniformRandom };

/// Feedback delays bounded by D(k) = c * k^alpha_d + d_bar.
///
/// Deterministic mode returns D(k) itself; uniform-random mode draws
/// i.i.d. from [0, D(k)]. The homogeneous kind gives every player the same
/// delay at a given k.
struct DelayModel {
  DelayKind kind = DelayKind::HeterogeneousBounded;
  DelayMode mode = DelayMode::UniformRandom;
  double c = 1.0;
  double alpha_d = 0.0;
  double d_bar = 0.0;

  double bound(std::int64_t k) const;
  /// Throws ConfigError unless c >= 0, 0 <= alpha_d < 1 and d_bar >= 0.
  void validate() const;
};

/// One delay draw for play iteration k (k >= 1).
double sample_delay(const DelayModel& model, std::int64_t k, RandomStream& rng);

/// The iteration at which feedback played at t with delay d is received:
/// the unique k with k - 1 < t + d <= k.
std::int64_t arrival_iteration(std::int64_t t, double d);

/// Per-player delay streams for one run. Heterogeneous models draw from a
/// stream per player; homogeneous ones draw once per iteration from a
/// common stream and hand the same value to every player. Iterations must be
/// requested in nondecreasing order.
class DelaySampler {
 public:
  DelaySampler(DelayModel model, std::size_t players, std::uint64_t master_seed);
  double delay(std::size_t player, std::int64_t k);
  const DelayModel& model() const { return model_; }

 private:
  DelayModel model_;
  std::vector<RandomStream> per_player_;
  RandomStream common_;
  std::int64_t common_k_ = 0;
  double common_value_ = 0.0;
};

/// A realized objective value travelling through the delay channel.
struct FeedbackRecord {
  std::int64_t t = 0;
  double value = 0.0;
  Vector direction;   // u_t, drawn at play time
  double radius = 0;  // delta_t, the query radius used at play time
  int usage_count = 0;
  bool paired_prev = false;  // G_t has been formed (with t - 1)
  bool paired_next = false;  // G_{t+1} has been formed (with t + 1)
};

/// Number of estimates a record takes part in: G_2 only for t = 1 (there is
/// no G_1), G_t and G_{t+1} otherwise.
constexpr int expected_uses(std::int64_t t) { return t == 1 ? 1 : 2; }

struct EstimateRecord {
  std::int64_t t = 0;
  Vector estimate;
};

struct PoppedEstimate {
  std::int64_t t = 1;
  Vector estimate;
  bool sentinel = true;  // queue was empty: zero estimate, no update
};

/// Value cache P_J, estimate priority queue P_G and the consumption index
/// for one player.
class PlayerQueues {
 public:
  explicit PlayerQueues(std::size_t dim, EstimatorKind kind = EstimatorKind::Residual);

  /// Caches the arrivals, forms every estimate that became computable,
  /// evicts records that reached expected_uses, and pushes the new
  /// estimates into P_G. Returns the new estimates. Throws IntegrityError on
  /// a timestamp that was already ingested.
  std::vector<EstimateRecord> ingest(std::vector<FeedbackRecord> arrivals);

  /// Removes and returns the earliest estimate, or the sentinel (t = 1, zero
  /// vector) when P_G is empty.
  PoppedEstimate pop_earliest();

  std::size_t dim() const { return dim_; }
  std::size_t cache_size() const { return cache_.size(); }
  std::size_t queue_size() const { return queue_.size(); }
  bool cached(std::int64_t t) const { return cache_.count(t) != 0; }
  const FeedbackRecord* cached_record(std::int64_t t) const;
  std::int64_t last_consumed() const { return last_consumed_; }
  std::int64_t estimates_formed() const { return estimates_formed_; }

 private:
  struct Later {
    bool operator()(const EstimateRecord& a, const EstimateRecord& b) const { return a.t > b.t; }
  };

  void push(EstimateRecord rec, std::vector<EstimateRecord>& created);
  void evict_if_spent(std::int64_t t);

  std::size_t dim_;
  EstimatorKind kind_;
  std::map<std::int64_t, FeedbackRecord> cache_;
  std::priority_queue<EstimateRecord, std::vector<EstimateRecord>, Later> queue_;
  std::vector<bool> seen_;
  std::int64_t last_consumed_ = 0;
  std::int64_t estimates_formed_ = 0;
};

/// In-flight feedback for one player, ordered by arrival iteration.
class FeedbackChannel {
 public:
  void send(std::int64_t arrival, FeedbackRecord rec);
  /// Everything with arrival <= k, sorted by timestamp.
  std::vector<FeedbackRecord> deliver(std::int64_t k);
  std::size_t in_flight() const { return heap_.size(); }

 private:
  struct Item {
    std::int64_t arrival;
    FeedbackRecord rec;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      return a.arrival != b.arrival ? a.arrival > b.arrival : a.rec.t > b.rec.t;
    }
  };
  std::priority_queue<Item, std::vector<Item>, Later> heap_;
};

/// K_empty(k): number of iterations among 1..k whose estimate queue was
/// empty. history[s - 1] is the flag for iteration s.
std::int64_t starvation_count(const std::vector<bool>& history, std::int64_t k);

}  // namespace bmd
