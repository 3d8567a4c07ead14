#pragma once

#include <span>
#include <vector>

#include "bmd/types.hpp"

namespace bmd {

/// The halfspace { x : <normal, x> <= offset }. Normals are stored as given
/// (not normalized).
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

/// A bounded box with nonempty interior, optionally cut by halfspaces.
class FeasibleSet {
 public:
  FeasibleSet() = default;
  /// Throws ConfigError when the box is unbounded, has an empty interior, or
  /// a halfspace has the wrong dimension or a zero normal.
  FeasibleSet(Vector lower, Vector upper, std::vector<Halfspace> halfspaces = {});

  static FeasibleSet box(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

  /// Largest constraint violation at x (<= 0 inside the set).
  double max_violation(std::span<const double> x) const;
  bool contains(std::span<const double> x, double tol = 1e-9) const {
    return max_violation(x) <= tol;
  }

  // Row-major normals, offsets and 1/||a||^2, packed for the kernels.
  const Vector& packed_normals() const { return rows_; }
  const Vector& packed_offsets() const { return offsets_; }
  const Vector& inverse_squared_norms() const { return inv_sqnorm_; }

 private:
  Vector lower_;
  Vector upper_;
  std::vector<Halfspace> halfspaces_;
  Vector rows_;
  Vector offsets_;
  Vector inv_sqnorm_;
};

/// Moves axis-aligned halfspaces into the box bounds and drops halfspaces
/// that the box already implies. The resulting set is identical as a set.
FeasibleSet simplified(const FeasibleSet& set);

/// Euclidean ball B(center, radius) that should lie inside a FeasibleSet.
struct InteriorBall {
  Vector center;
  double radius = 0.0;
};

/// True iff every box margin is at least `radius` and
/// <a, center> + radius * ||a||_2 <= b holds for every halfspace.
bool verify_interior_ball(const FeasibleSet& set, const InteriorBall& ball);

/// Starts from the box midpoint with half the narrowest box width and shrinks
/// the radius by `factor` until verify_interior_ball passes. Throws
/// ConfigError after `max_steps` failed attempts.
InteriorBall find_interior_ball(const FeasibleSet& set, int max_steps = 50, double factor = 0.9);

struct ProjectionOptions {
  double tol = 1e-10;  // on the change of the iterate over one sweep
  int max_iter = 10000;
};

/// Euclidean projection of z onto the set by Dykstra's alternating
/// projections over the box and each halfspace. Throws NumericalError
/// (carrying the last sweep change) if max_iter sweeps do not reach tol.
Vector project_polytope(const FeasibleSet& set, std::span<const double> z,
                        const ProjectionOptions& opts = {});
void project_polytope_into(const FeasibleSet& set, std::span<const double> z,
                           std::span<double> out, const ProjectionOptions& opts = {});

}  // namespace bmd
