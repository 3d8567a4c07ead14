#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "bmd/errors.hpp"
#include "bmd/kernels.hpp"
#include "bmd/runner.hpp"

namespace bmd {

void check_run_config(const RunConfig& cfg) {
  if (cfg.game == nullptr) throw ConfigError("run: no game");
  const Game& g = *cfg.game;
  if (cfg.horizon < 2) throw ConfigError("run: horizon must be at least 2");
  if (cfg.stride < 1) throw ConfigError("run: stride must be at least 1");
  if (cfg.replications < 1) throw ConfigError("run: replications must be at least 1");
  cfg.delay.validate();
  const auto& s = cfg.schedule;
  if (!(s.gamma0 > 0.0) || !(s.delta0 > 0.0)) throw ConfigError("run: gamma0 and delta0 must be positive");
  if (!(s.k_gamma >= 0.0) || !(s.k_delta >= 0.0)) throw ConfigError("run: schedule offsets must be nonnegative");
  if (!(s.alpha_delta >= 0.0)) throw ConfigError("run: alpha_delta must be nonnegative");
  const double delta1 = query_radius(s, 1);
  if (delta1 > g.min_ball_radius())
    throw ConfigError("run: delta_1 = " + std::to_string(delta1) + " exceeds the smallest interior-ball radius " +
                      std::to_string(g.min_ball_radius()));
  const std::size_t n = g.layout().total();
  if (cfg.initial) {
    if (cfg.initial->size() != n) throw ConfigError("run: initial action has the wrong size");
    if (!g.contains(*cfg.initial)) throw ConfigError("run: initial action is infeasible");
  }
  if (cfg.x_star && cfg.x_star->size() != n) throw ConfigError("run: x* has the wrong size");
  if (cfg.mirror.kind == MirrorKind::Entropic)
    for (std::size_t i = 0; i < g.players(); ++i)
      if (!is_corner_simplex(g.feasible_set(i)))
        throw ConfigError("run: the entropic mirror map needs corner-simplex feasible sets");
}

RunResult run(const RunConfig& cfg, const Observer& observer) {
  check_run_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  const Game& game = *cfg.game;
  const BlockLayout& layout = game.layout();
  const std::size_t players = game.players();
  const std::size_t total = layout.total();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  DelaySampler delays(cfg.delay, players, cfg.seed);
  std::vector<RandomStream> directions;
  std::vector<PlayerQueues> queues;
  std::vector<FeedbackChannel> channels(players);
  for (std::size_t i = 0; i < players; ++i) {
    directions.emplace_back(cfg.seed, "direction", i);
    queues.emplace_back(layout.dim(i), cfg.estimator);
  }

  Vector x = cfg.initial ? *cfg.initial : game.ball_centers();
  Vector x_next(total), x_hat(total), u(total), ghat(total), step(total), values(players);
  std::vector<std::int64_t> popped(players, 0);

  const bool want_gap = cfg.phi_star.has_value() && game.has_potential();
  const double x_star_norm = cfg.x_star ? kernels::norm2(*cfg.x_star) : 0.0;

  RunResult result;
  RunStats& st = result.stats;
  st.starvation.assign(players, 0);
  st.max_lag.assign(players, 0);
  if (cfg.stride <= cfg.horizon) result.trace.reserve(static_cast<std::size_t>(cfg.horizon / cfg.stride));

  // Draw u_k and delta_k, play X_hat_k, and send each player's value into
  // its delay channel.
  auto play = [&](std::int64_t k) {
    const double delta = query_radius(cfg.schedule, k);
    for (std::size_t i = 0; i < players; ++i) {
      auto ui = layout.block(std::span<double>(u), i);
      sample_unit_sphere_into(ui, directions[i]);
      perturb_into(layout.block(std::span<const double>(x), i), game.ball(i), delta, ui,
                   layout.block(std::span<double>(x_hat), i));
    }
    game.objectives(x_hat, values);
    for (std::size_t i = 0; i < players; ++i) {
      if (!std::isfinite(values[i]))
        throw NumericalError("run: non-finite objective value at iteration " + std::to_string(k), values[i]);
      const auto ui = layout.block(std::span<const double>(u), i);
      FeedbackRecord rec;
      rec.t = k;
      rec.value = values[i];
      rec.direction.assign(ui.begin(), ui.end());
      rec.radius = delta;
      channels[i].send(arrival_iteration(k, delays.delay(i, k)), std::move(rec));
    }
  };

  play(1);
  for (std::int64_t k = 1; k <= cfg.horizon; ++k) {
    const double gamma = step_size(cfg.schedule, k);
    int starved = 0;
    for (std::size_t i = 0; i < players; ++i) {
      queues[i].ingest(channels[i].deliver(k));
      PoppedEstimate p = queues[i].pop_earliest();
      const auto xi = layout.block(std::span<const double>(x), i);
      auto gi = layout.block(std::span<double>(ghat), i);
      auto next = layout.block(std::span<double>(x_next), i);
      if (p.sentinel) {
        ++starved;
        ++st.starvation[i];
        popped[i] = 0;
        std::fill(gi.begin(), gi.end(), 0.0);
        std::copy(xi.begin(), xi.end(), next.begin());
        continue;
      }
      popped[i] = p.t;
      st.max_lag[i] = std::max(st.max_lag[i], k - p.t);
      std::copy(p.estimate.begin(), p.estimate.end(), gi.begin());
      auto yi = layout.block(std::span<double>(step), i);
      for (std::size_t j = 0; j < gi.size(); ++j) yi[j] = gamma * gi[j];
      prox_step_into(cfg.mirror, game.feasible_set(i), xi, yi, next, cfg.projection);
    }

    const double gnorm = kernels::norm2(ghat);
    if (!std::isfinite(gnorm)) throw NumericalError("run: non-finite estimate at iteration " + std::to_string(k), gnorm);
    st.max_ghat_norm = std::max(st.max_ghat_norm, gnorm);
    if (k > cfg.ghat_burn_in) st.max_ghat_after_burn_in = std::max(st.max_ghat_after_burn_in, gnorm);

    if (k % cfg.stride == 0) {
      TraceRow row;
      row.iteration = k;
      if (cfg.x_star) {
        const double d = std::sqrt(kernels::squared_distance(x_hat, *cfg.x_star));
        row.rel_dist = x_star_norm > 0.0 ? d / x_star_norm : d;
      } else {
        row.rel_dist = nan;
      }
      row.potential_gap = want_gap ? game.potential(x_hat) - *cfg.phi_star : nan;
      row.ghat_norm = gnorm;
      row.starved_players = starved;
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      result.trace.push_back(row);
    }

    if (observer) observer(IterationView{k, x, x_next, x_hat, ghat, popped, gamma});

    x.swap(x_next);
    if (k < cfg.horizon) play(k + 1);
  }

  for (std::size_t i = 0; i < players; ++i) {
    st.cache_left.push_back(queues[i].cache_size());
    st.queue_left.push_back(queues[i].queue_size());
    st.in_flight.push_back(channels[i].in_flight());
  }
  st.final_x = std::move(x);
  st.final_x_hat = std::move(x_hat);
  return result;
}

}  // namespace bmd
