#pragma once

#include <optional>

#include "bmd/game.hpp"

namespace bmd {

struct OracleResult {
  Vector x_star;
  std::optional<double> potential;  // Phi(x*) when the game has one
  double vi_residual = 0.0;         // ||x* - Proj(x* - eta F(x*))||
  double step = 0.0;                // eta
  int iterations = 0;
};

/// Projected-gradient iteration x <- Proj(x - eta F(x)) with the game's
/// oracle step, from the ball centers until ||x_{k+1} - x_k|| < tol.
/// Throws NumericalError when max_iter is reached or the final fixed-point
/// residual is not below 10 * tol.
OracleResult solve_critical_point(const Game& game, double tol = 1e-10, int max_iter = 200000);

}  // namespace bmd
