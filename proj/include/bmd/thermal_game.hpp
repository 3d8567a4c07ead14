#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bmd/game.hpp"

namespace bmd {

/// First-order building model r_t = a r_{t-1} + b x_t, y_t = c r_t with a
/// comfort band on y_t and a power cap on x_t.
struct BuildingParams {
  double a = 0.7;
  double b = 1.0;
  double c = 1.0;
  double r0 = 0.0;
  double power_cap = 3.0;
  Vector comfort_lo;  // per slot; -inf drops the constraint
  Vector comfort_hi;  // per slot; +inf drops the constraint
};

/// Thermal load management game: building i pays
///   p_e' x^i + sum_t lambda_it (x^i_t)^2 + p_d R^i(x)
/// where R^i is its clique-restricted Shapley share of the smoothed peak.
struct ThermalGameSpec {
  std::size_t buildings = 0;
  std::size_t slots = 0;
  Vector price_energy;                           // p_e, one entry per slot
  double price_peak = 0.0;                       // p_d
  std::vector<Vector> lambda;                    // per building, per slot
  std::vector<std::vector<std::size_t>> cliques;  // 0-based building ids
  double smoothing = 10.0;                       // C
  std::vector<BuildingParams> building;
  std::vector<InteriorBall> balls;  // empty: derived with find_interior_ball
};

/// The shipped default instance: 20 buildings, 4 slots, six cliques of sizes
/// 3..8 covering every building, lambda drawn uniformly from [0.04, 0.06].
ThermalGameSpec default_thermal_spec(std::uint64_t lambda_seed = 7);

/// Throws ConfigError on inconsistent sizes, C <= 0, empty cliques, out of
/// range members, or a building that belongs to no clique.
void validate_thermal_spec(const ThermalGameSpec& spec);

/// (N - |C|)! (|C| - 1)! / N!, evaluated through log-gamma.
double shapley_weight(std::size_t players, std::size_t clique_size);

/// V(members, x) = (1/C) log sum_t exp(C sum_{l in members} x^l_t), with the
/// maximum exponent factored out. The empty clique gives log(T)/C.
/// `x` is stacked building-major with `slots` entries per building.
double lse_value(std::span<const std::size_t> members, std::span<const double> x,
                 std::size_t slots, double smoothing);

double shapley_share(std::size_t i, std::span<const double> x, const ThermalGameSpec& spec);
double thermal_objective(std::size_t i, std::span<const double> x, const ThermalGameSpec& spec);
Vector thermal_gradient(std::size_t i, std::span<const double> x, const ThermalGameSpec& spec);
double potential_value(std::span<const double> x, const ThermalGameSpec& spec);

/// Box 0 <= x_t <= power_cap intersected with the unrolled comfort
/// constraints, then simplified (axis-aligned rows folded into the box,
/// rows implied by the box dropped). Throws ConfigError for b or c equal to
/// zero or an empty box.
FeasibleSet build_feasible_polytope(const BuildingParams& params, std::size_t slots);

class ThermalGame final : public Game {
 public:
  explicit ThermalGame(ThermalGameSpec spec);

  double objective(std::size_t i, std::span<const double> x) const override;
  void objectives(std::span<const double> x, std::span<double> out) const override;
  bool has_pseudo_gradient() const override { return true; }
  void pseudo_gradient(std::span<const double> x, std::span<double> out) const override;
  bool has_potential() const override { return true; }
  double potential(std::span<const double> x) const override;
  /// 1 / L with L = 2 max lambda + p_d C sum_j w_j |C_j|, a bound on the
  /// Hessian norm of the potential.
  double oracle_step() const override;

  const ThermalGameSpec& spec() const { return spec_; }

 private:
  ThermalGameSpec spec_;
  std::vector<double> weights_;                        // per clique
  std::vector<std::vector<std::size_t>> memberships_;  // per building: clique ids
  double lipschitz_ = 0.0;
};

}  // namespace bmd
