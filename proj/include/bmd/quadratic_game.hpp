#pragma once

#include <vector>

#include "bmd/game.hpp"

namespace bmd {

/// J^i(x) = 1/2 x_i' A_ii x_i + x_i' sum_{j != i} A_ij x_j + b_i' x_i, with
/// A given as the full stacked n x n matrix (row-major) and b stacked.
struct QuadraticGameSpec {
  std::vector<std::size_t> dims;
  Vector matrix;  // n * n, row-major
  Vector linear;  // n
  std::vector<FeasibleSet> sets;
  std::vector<InteriorBall> balls;  // empty: derived with find_interior_ball
};

/// Strongly monotone quadratic game: F(x) = A x + b with A + A' positive
/// definite, checked at construction.
class QuadraticGame final : public Game {
 public:
  explicit QuadraticGame(QuadraticGameSpec spec);

  double objective(std::size_t i, std::span<const double> x) const override;
  bool has_pseudo_gradient() const override { return true; }
  void pseudo_gradient(std::span<const double> x, std::span<double> out) const override;
  /// mu / L^2, with mu the smallest eigenvalue of sym(A) and L = ||A||_2.
  double oracle_step() const override;

  double monotonicity_modulus() const { return mu_; }
  double lipschitz() const { return lipschitz_; }
  const QuadraticGameSpec& spec() const { return spec_; }

 private:
  QuadraticGameSpec spec_;
  double mu_ = 0.0;
  double lipschitz_ = 0.0;
};

}  // namespace bmd
