#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "bmd/errors.hpp"
#include "bmd/game.hpp"

namespace bmd {
namespace {

std::vector<std::size_t> dims_of(const std::vector<FeasibleSet>& sets) {
  std::vector<std::size_t> d;
  for (const auto& s : sets) d.push_back(s.dim());
  return d;
}

}  // namespace

Game::Game(std::vector<FeasibleSet> sets, std::vector<InteriorBall> balls)
    : layout_(dims_of(sets)), sets_(std::move(sets)), balls_(std::move(balls)) {
  if (sets_.empty()) throw ConfigError("game: at least one player is required");
  if (balls_.size() != sets_.size()) throw ConfigError("game: one interior ball per player is required");
  for (std::size_t i = 0; i < sets_.size(); ++i)
    if (!verify_interior_ball(sets_[i], balls_[i]))
      throw ConfigError("game: interior ball of player " + std::to_string(i) +
                        " is not contained in its feasible set");
}

double Game::min_ball_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& b : balls_) r = std::min(r, b.radius);
  return r;
}

void Game::objectives(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < players(); ++i) out[i] = objective(i, x);
}

void Game::pseudo_gradient(std::span<const double>, std::span<double>) const {
  throw std::logic_error("game does not expose a pseudo-gradient");
}

double Game::potential(std::span<const double>) const {
  throw std::logic_error("game does not expose a potential");
}

double Game::oracle_step() const { throw std::logic_error("game does not expose an oracle step"); }

bool Game::contains(std::span<const double> x, double tol) const {
  for (std::size_t i = 0; i < players(); ++i)
    if (!sets_[i].contains(layout_.block(x, i), tol)) return false;
  return true;
}

Vector Game::ball_centers() const {
  Vector x;
  x.reserve(layout_.total());
  for (const auto& b : balls_) x.insert(x.end(), b.center.begin(), b.center.end());
  return x;
}

}  // namespace bmd
