#include <algorithm>
#include <string>

#include "bmd/delay.hpp"
#include "bmd/errors.hpp"

namespace bmd {

PlayerQueues::PlayerQueues(std::size_t dim, EstimatorKind kind) : dim_(dim), kind_(kind) {}

const FeedbackRecord* PlayerQueues::cached_record(std::int64_t t) const {
  auto it = cache_.find(t);
  return it == cache_.end() ? nullptr : &it->second;
}

void PlayerQueues::push(EstimateRecord rec, std::vector<EstimateRecord>& created) {
  created.push_back(rec);
  queue_.push(std::move(rec));
  ++estimates_formed_;
}

void PlayerQueues::evict_if_spent(std::int64_t t) {
  auto it = cache_.find(t);
  if (it != cache_.end() && it->second.usage_count >= expected_uses(t)) cache_.erase(it);
}

std::vector<EstimateRecord> PlayerQueues::ingest(std::vector<FeedbackRecord> arrivals) {
  std::vector<EstimateRecord> created;
  std::vector<std::int64_t> order;
  order.reserve(arrivals.size());

  for (auto& rec : arrivals) {
    if (rec.t < 1) throw IntegrityError("feedback timestamp must be >= 1");
    const auto idx = static_cast<std::size_t>(rec.t);
    if (idx >= seen_.size()) seen_.resize(idx + 1 + seen_.size() / 2, false);
    if (seen_[idx]) throw IntegrityError("feedback timestamp " + std::to_string(rec.t) + " ingested twice");
    seen_[idx] = true;
    order.push_back(rec.t);
    if (kind_ == EstimatorKind::SinglePoint) {
      push({rec.t, single_point_estimate(rec.value, rec.direction, rec.radius, dim_)}, created);
      continue;
    }
    rec.usage_count = 0;
    rec.paired_prev = rec.paired_next = false;
    cache_.emplace(rec.t, std::move(rec));
  }
  if (kind_ == EstimatorKind::SinglePoint) return created;

  for (std::int64_t t : order) {
    auto it = cache_.find(t);
    if (it == cache_.end()) continue;  // already spent by an earlier arrival in this batch
    FeedbackRecord& cur = it->second;

    if (!cur.paired_next) {
      auto nx = cache_.find(t + 1);
      if (nx != cache_.end()) {
        FeedbackRecord& next = nx->second;
        push({t + 1, residual_estimate(next.value, cur.value, next.direction, next.radius, dim_)},
             created);
        cur.paired_next = next.paired_prev = true;
        ++cur.usage_count;
        ++next.usage_count;
      }
    }
    if (t >= 2 && !cur.paired_prev) {
      auto pv = cache_.find(t - 1);
      if (pv != cache_.end()) {
        FeedbackRecord& prev = pv->second;
        push({t, residual_estimate(cur.value, prev.value, cur.direction, cur.radius, dim_)}, created);
        cur.paired_prev = prev.paired_next = true;
        ++cur.usage_count;
        ++prev.usage_count;
      }
    }
    evict_if_spent(t - 1);
    evict_if_spent(t + 1);
    evict_if_spent(t);
  }
  return created;
}

PoppedEstimate PlayerQueues::pop_earliest() {
  if (queue_.empty()) return {1, Vector(dim_, 0.0), true};
  // priority_queue::top is const; the record is discarded right after.
  PoppedEstimate out{queue_.top().t, std::move(const_cast<EstimateRecord&>(queue_.top()).estimate),
                     false};
  queue_.pop();
  last_consumed_ = out.t;
  return out;
}

void FeedbackChannel::send(std::int64_t arrival, FeedbackRecord rec) {
  heap_.push({arrival, std::move(rec)});
}

std::vector<FeedbackRecord> FeedbackChannel::deliver(std::int64_t k) {
  std::vector<FeedbackRecord> out;
  while (!heap_.empty() && heap_.top().arrival <= k) {
    out.push_back(std::move(const_cast<Item&>(heap_.top()).rec));
    heap_.pop();
  }
  std::sort(out.begin(), out.end(), [](const FeedbackRecord& a, const FeedbackRecord& b) { return a.t < b.t; });
  return out;
}

}  // namespace bmd
