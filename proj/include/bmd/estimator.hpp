#pragma once

#include <span>

#include "bmd/geometry.hpp"
#include "bmd/rng.hpp"
#include "bmd/types.hpp"

namespace bmd {

enum class EstimatorKind { Residual, SinglePoint };

/// Uniform direction on the unit sphere in R^dim: a normalized Gaussian
/// draw, redrawn in the (numerically possible) all-zero case.
Vector sample_unit_sphere(std::size_t dim, RandomStream& rng);
void sample_unit_sphere_into(std::span<double> out, RandomStream& rng);

struct Perturbation {
  Vector x_bar;  // (1 - delta/r) x + (delta/r) p
  Vector x_hat;  // x_bar + delta u, the action actually played
};

/// Pulls x toward the interior-ball center and steps delta along u. Keeps
/// x_hat inside the feasible set whenever x is feasible and
/// 0 <= delta <= ball.radius; larger delta is rejected with DomainError.
Perturbation perturb(std::span<const double> x, const InteriorBall& ball, double delta,
                     std::span<const double> u);
void perturb_into(std::span<const double> x, const InteriorBall& ball, double delta,
                  std::span<const double> u, std::span<double> x_hat);

/// (dim / delta) * (j_curr - j_prev) * u
Vector residual_estimate(double j_curr, double j_prev, std::span<const double> u, double delta,
                         std::size_t dim);

/// (dim / delta) * j_curr * u
Vector single_point_estimate(double j_curr, std::span<const double> u, double delta,
                             std::size_t dim);

}  // namespace bmd
