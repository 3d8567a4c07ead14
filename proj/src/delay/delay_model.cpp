#include <cmath>

#include "bmd/delay.hpp"
#include "bmd/errors.hpp"

namespace bmd {

double DelayModel::bound(std::int64_t k) const {
  const double growth = c == 0.0 ? 0.0 : c * std::pow(static_cast<double>(k), alpha_d);
  return growth + d_bar;
}

void DelayModel::validate() const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("delays: c must be finite and >= 0");
  if (!(alpha_d >= 0.0 && alpha_d < 1.0)) throw ConfigError("delays: alpha_d must lie in [0, 1)");
  if (!(d_bar >= 0.0) || !std::isfinite(d_bar))
    throw ConfigError("delays: d_bar must be finite and >= 0");
}

double sample_delay(const DelayModel& model, std::int64_t k, RandomStream& rng) {
  const double b = model.bound(k);
  if (model.mode == DelayMode::Deterministic) return b;
  return b * rng.uniform();
}

std::int64_t arrival_iteration(std::int64_t t, double d) {
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(t) + d));
}

DelaySampler::DelaySampler(DelayModel model, std::size_t players, std::uint64_t master_seed)
    : model_(model), common_(master_seed, "delay-common", 0) {
  model_.validate();
  per_player_.reserve(players);
  for (std::size_t i = 0; i < players; ++i) per_player_.emplace_back(master_seed, "delay", i);
}

double DelaySampler::delay(std::size_t player, std::int64_t k) {
  if (model_.kind == DelayKind::HeterogeneousBounded) return sample_delay(model_, k, per_player_[player]);
  if (k != common_k_) {
    common_value_ = sample_delay(model_, k, common_);
    common_k_ = k;
  }
  return common_value_;
}

std::int64_t starvation_count(const std::vector<bool>& history, std::int64_t k) {
  std::int64_t n = 0;
  for (std::int64_t s = 0; s < k && s < static_cast<std::int64_t>(history.size()); ++s)
    n += history[static_cast<std::size_t>(s)] ? 1 : 0;
  return n;
}

}  // namespace bmd
