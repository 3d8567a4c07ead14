#include <algorithm>
#include <cmath>
#include <string>

#include "bmd/errors.hpp"
#include "bmd/kernels.hpp"
#include "bmd/mirror.hpp"

namespace bmd {
namespace {

double slack(std::span<const double> x) {
  double s = 1.0;
  for (double v : x) s -= v;
  return s;
}

void require_simplex_interior(std::span<const double> x, const char* what) {
  for (double v : x)
    if (!(v > 0.0)) throw DomainError(std::string("entropic bregman: nonpositive entry in ") + what);
  if (!(slack(x) > 0.0)) throw DomainError(std::string("entropic bregman: ") + what + " has no slack");
}

}  // namespace

double bregman(const MirrorStructure& s, std::span<const double> p, std::span<const double> x) {
  if (p.size() != x.size()) throw DomainError("bregman: dimension mismatch");
  if (s.kind == MirrorKind::Euclidean) return 0.5 * kernels::squared_distance(p, x);

  require_simplex_interior(p, "p");
  require_simplex_interior(x, "x");
  double d = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) d += p[j] * std::log(p[j] / x[j]);
  const double p0 = slack(p), x0 = slack(x);
  d += p0 * std::log(p0 / x0);
  return std::max(d, 0.0);
}

bool is_corner_simplex(const FeasibleSet& set) {
  if (set.halfspaces().size() != 1) return false;
  const auto& h = set.halfspaces().front();
  if (h.offset != 1.0) return false;
  for (std::size_t j = 0; j < set.dim(); ++j) {
    if (h.normal[j] != 1.0 || set.lower()[j] != 0.0 || set.upper()[j] < 1.0) return false;
  }
  return true;
}

Vector prox_step(const MirrorStructure& s, const FeasibleSet& set, std::span<const double> x,
                 std::span<const double> y, const ProjectionOptions& opts) {
  Vector out(x.size());
  prox_step_into(s, set, x, y, out, opts);
  return out;
}

void prox_step_into(const MirrorStructure& s, const FeasibleSet& set, std::span<const double> x,
                    std::span<const double> y, std::span<double> out,
                    const ProjectionOptions& opts) {
  const std::size_t n = x.size();
  if (y.size() != n || out.size() != n || set.dim() != n)
    throw DomainError("prox_step: dimension mismatch");

  if (s.kind == MirrorKind::Euclidean) {
    thread_local Vector shifted;
    shifted.assign(x.begin(), x.end());
    kernels::axpy(-1.0, y, shifted);
    project_polytope_into(set, shifted, out, opts);
    return;
  }

  if (!is_corner_simplex(set))
    throw DomainError("prox_step: entropic structure needs the corner simplex {x >= 0, sum x <= 1}");
  require_simplex_interior(x, "x");
  // Shift exponents by the smallest dual entry (the slack coordinate has
  // dual entry 0) so every factor is at most 1.
  const double shift = std::min(0.0, *std::min_element(y.begin(), y.end()));
  double z = slack(x) * std::exp(shift);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = x[j] * std::exp(shift - y[j]);
    z += out[j];
  }
  for (std::size_t j = 0; j < n; ++j) out[j] /= z;
}

}  // namespace bmd
