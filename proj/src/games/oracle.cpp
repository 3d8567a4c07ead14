#include <cmath>
#include <string>

#include "bmd/errors.hpp"
#include "bmd/kernels.hpp"
#include "bmd/oracle.hpp"

namespace bmd {
namespace {

// x_next = Proj(x - eta F(x)) blockwise; returns ||x_next - x||.
double forward_step(const Game& game, std::span<const double> x, double eta, Vector& grad,
                    Vector& next, const ProjectionOptions& popts) {
  game.pseudo_gradient(x, grad);
  const auto& layout = game.layout();
  Vector shifted(x.begin(), x.end());
  kernels::axpy(-eta, grad, shifted);
  for (std::size_t i = 0; i < game.players(); ++i)
    project_polytope_into(game.feasible_set(i), layout.block(std::span<const double>(shifted), i),
                          layout.block(std::span<double>(next), i), popts);
  return std::sqrt(kernels::squared_distance(next, x));
}

}  // namespace

OracleResult solve_critical_point(const Game& game, double tol, int max_iter) {
  if (!game.has_pseudo_gradient()) throw ConfigError("oracle: game has no analytic pseudo-gradient");
  if (!(tol > 0.0)) throw DomainError("oracle: tol must be positive");
  const double eta = game.oracle_step();
  // Inner projections must be well below the outer tolerance.
  const ProjectionOptions popts{std::max(tol * 1e-2, 1e-15), 100000};

  Vector x = game.ball_centers();
  Vector grad(x.size()), next(x.size());
  double change = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iter; ++it) {
    change = forward_step(game, x, eta, grad, next, popts);
    x.swap(next);
    if (change < tol) break;
  }
  if (!(change < tol))
    throw NumericalError("oracle: projected-gradient iteration did not converge in " +
                             std::to_string(max_iter) + " iterations",
                         change);

  OracleResult r;
  r.vi_residual = forward_step(game, x, eta, grad, next, popts);
  if (!(r.vi_residual < 10.0 * tol))
    throw NumericalError("oracle: fixed-point residual check failed", r.vi_residual);
  r.x_star = std::move(x);
  r.step = eta;
  r.iterations = it + 1;
  if (game.has_potential()) r.potential = game.potential(r.x_star);
  return r;
}

}  // namespace bmd
