#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bmd/errors.hpp"
#include "bmd/geometry.hpp"
#include "bmd/kernels.hpp"

namespace bmd {

FeasibleSet::FeasibleSet(Vector lower, Vector upper, std::vector<Halfspace> halfspaces)
    : lower_(std::move(lower)), upper_(std::move(upper)), halfspaces_(std::move(halfspaces)) {
  const std::size_t n = lower_.size();
  if (n == 0) throw ConfigError("feasible set: dimension must be positive");
  if (upper_.size() != n) throw ConfigError("feasible set: lower/upper dimension mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]))
      throw ConfigError("feasible set: box bounds must be finite (coordinate " +
                        std::to_string(j) + ")");
    if (!(lower_[j] < upper_[j]))
      throw ConfigError("feasible set: empty interior, lower >= upper at coordinate " +
                        std::to_string(j));
  }
  rows_.reserve(n * halfspaces_.size());
  for (std::size_t r = 0; r < halfspaces_.size(); ++r) {
    const auto& h = halfspaces_[r];
    if (h.normal.size() != n)
      throw ConfigError("feasible set: halfspace " + std::to_string(r) + " has wrong dimension");
    const double sq = kernels::scalar_table().dot(h.normal.data(), h.normal.data(), n);
    if (!(sq > 0.0) || !std::isfinite(h.offset))
      throw ConfigError("feasible set: halfspace " + std::to_string(r) + " is degenerate");
    rows_.insert(rows_.end(), h.normal.begin(), h.normal.end());
    offsets_.push_back(h.offset);
    inv_sqnorm_.push_back(1.0 / sq);
  }
}

FeasibleSet FeasibleSet::box(std::size_t dim, double lo, double hi) {
  return FeasibleSet(Vector(dim, lo), Vector(dim, hi));
}

double FeasibleSet::max_violation(std::span<const double> x) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < dim(); ++j)
    worst = std::max({worst, lower_[j] - x[j], x[j] - upper_[j]});
  for (std::size_t r = 0; r < halfspaces_.size(); ++r) {
    const double v = kernels::dot(halfspaces_[r].normal, x) - offsets_[r];
    worst = std::max(worst, v);
  }
  return worst;
}

FeasibleSet simplified(const FeasibleSet& set) {
  Vector lo = set.lower();
  Vector hi = set.upper();
  std::vector<Halfspace> kept;
  const std::size_t n = set.dim();
  for (const auto& h : set.halfspaces()) {
    std::size_t nonzero = 0, idx = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (h.normal[j] != 0.0) {
        ++nonzero;
        idx = j;
      }
    if (nonzero == 1) {
      const double bound = h.offset / h.normal[idx];
      if (h.normal[idx] > 0.0)
        hi[idx] = std::min(hi[idx], bound);
      else
        lo[idx] = std::max(lo[idx], bound);
      continue;
    }
    kept.push_back(h);
  }
  // Drop rows whose maximum over the (tightened) box stays below the offset.
  std::vector<Halfspace> out;
  for (auto& h : kept) {
    double box_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) box_max += std::max(h.normal[j] * lo[j], h.normal[j] * hi[j]);
    if (box_max > h.offset) out.push_back(std::move(h));
  }
  return FeasibleSet(std::move(lo), std::move(hi), std::move(out));
}

bool verify_interior_ball(const FeasibleSet& set, const InteriorBall& ball) {
  if (ball.center.size() != set.dim() || !(ball.radius > 0.0)) return false;
  for (std::size_t j = 0; j < set.dim(); ++j) {
    if (ball.center[j] - ball.radius < set.lower()[j]) return false;
    if (ball.center[j] + ball.radius > set.upper()[j]) return false;
  }
  for (const auto& h : set.halfspaces()) {
    const double reach = kernels::dot(h.normal, ball.center) + ball.radius * kernels::norm2(h.normal);
    if (reach > h.offset) return false;
  }
  return true;
}

InteriorBall find_interior_ball(const FeasibleSet& set, int max_steps, double factor) {
  InteriorBall ball;
  ball.center.resize(set.dim());
  double half_width = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < set.dim(); ++j) {
    ball.center[j] = 0.5 * (set.lower()[j] + set.upper()[j]);
    half_width = std::min(half_width, 0.5 * (set.upper()[j] - set.lower()[j]));
  }
  ball.radius = half_width;
  for (int step = 0; step <= max_steps; ++step) {
    if (verify_interior_ball(set, ball)) return ball;
    ball.radius *= factor;
  }
  throw ConfigError("could not verify an interior ball around the box midpoint after " +
                    std::to_string(max_steps) + " shrink steps");
}

Vector project_polytope(const FeasibleSet& set, std::span<const double> z,
                        const ProjectionOptions& opts) {
  Vector out(z.size());
  project_polytope_into(set, z, out, opts);
  return out;
}

void project_polytope_into(const FeasibleSet& set, std::span<const double> z, std::span<double> out,
                           const ProjectionOptions& opts) {
  const std::size_t n = set.dim();
  if (z.size() != n || out.size() != n) throw DomainError("project_polytope: dimension mismatch");
  if (!(opts.tol > 0.0)) throw DomainError("project_polytope: tol must be positive");
  const auto& lo = set.lower();
  const auto& hi = set.upper();
  const std::size_t m = set.halfspaces().size();

  if (m == 0) {
    for (std::size_t j = 0; j < n; ++j) out[j] = std::clamp(z[j], lo[j], hi[j]);
    return;
  }

  const auto& k = kernels::active();
  const double* rows = set.packed_normals().data();
  const double* rhs = set.packed_offsets().data();
  const double* inv_sq = set.inverse_squared_norms().data();

  // Dykstra increments: a vector for the box, a scalar multiple of the
  // normal for each halfspace.
  thread_local Vector box_inc, hs_mult;
  box_inc.assign(n, 0.0);
  hs_mult.assign(m, 0.0);

  // Stop on the total movement of all sub-steps in a sweep. The sweep-to-sweep
  // change of the iterate alone can vanish while the increments still drift.
  std::copy(z.begin(), z.end(), out.begin());
  const double tol_sq = opts.tol * opts.tol;
  double moved_sq = 0.0;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    moved_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = out[j] + box_inc[j];
      const double p = std::clamp(y, lo[j], hi[j]);
      moved_sq += (p - out[j]) * (p - out[j]);
      out[j] = p;
      box_inc[j] = y - p;
    }
    for (std::size_t r = 0; r < m; ++r) {
      const double* a = rows + r * n;
      // y = x + c_r a; project y onto the halfspace.
      const double viol = k.dot(a, out.data(), n) + hs_mult[r] / inv_sq[r] - rhs[r];
      const double c_new = viol > 0.0 ? viol * inv_sq[r] : 0.0;
      const double shift = hs_mult[r] - c_new;
      if (shift != 0.0) {
        k.axpy(shift, a, out.data(), n);
        moved_sq += shift * shift / inv_sq[r];
      }
      hs_mult[r] = c_new;
    }
    if (moved_sq < tol_sq) return;
  }
  throw NumericalError("Dykstra projection did not converge in " + std::to_string(opts.max_iter) +
                           " sweeps",
                       std::sqrt(moved_sq));
}

}  // namespace bmd
