#pragma once

#include <span>
#include <vector>

#include "bmd/geometry.hpp"
#include "bmd/types.hpp"

namespace bmd {

/// A continuous N-player game: per-player feasible sets with verified
/// interior balls, and local objectives J^i evaluated at a stacked global
/// action. Oracle-side quantities (pseudo-gradient, potential) are optional.
/// Instances are immutable after construction.
class Game {
 public:
  virtual ~Game() = default;

  std::size_t players() const { return layout_.players(); }
  const BlockLayout& layout() const { return layout_; }
  const FeasibleSet& feasible_set(std::size_t i) const { return sets_[i]; }
  const InteriorBall& ball(std::size_t i) const { return balls_[i]; }
  double min_ball_radius() const;

  virtual double objective(std::size_t i, std::span<const double> x) const = 0;
  /// All J^i(x) at once; overridden where terms can be shared.
  virtual void objectives(std::span<const double> x, std::span<double> out) const;

  virtual bool has_pseudo_gradient() const { return false; }
  /// F(x) = [grad_{x^i} J^i(x)]_i. Throws std::logic_error when unavailable.
  virtual void pseudo_gradient(std::span<const double> x, std::span<double> out) const;

  virtual bool has_potential() const { return false; }
  virtual double potential(std::span<const double> x) const;

  /// Step size for the projected-gradient oracle that is guaranteed to make
  /// the forward map contract.
  virtual double oracle_step() const;

  bool contains(std::span<const double> x, double tol = 1e-9) const;
  /// Concatenated interior-ball centers.
  Vector ball_centers() const;

 protected:
  /// Throws ConfigError when a ball fails verify_interior_ball.
  Game(std::vector<FeasibleSet> sets, std::vector<InteriorBall> balls);

 private:
  BlockLayout layout_;
  std::vector<FeasibleSet> sets_;
  std::vector<InteriorBall> balls_;
};

}  // namespace bmd
