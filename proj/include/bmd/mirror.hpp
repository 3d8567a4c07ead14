#pragma once

#include <span>

#include "bmd/geometry.hpp"
#include "bmd/types.hpp"

namespace bmd {

enum class MirrorKind { Euclidean, Entropic };

/// Distance-generating function and its strong-convexity modulus.
///
/// Euclidean: psi(x) = 0.5 ||x||_2^2, modulus 1 w.r.t. the l2 norm.
/// Entropic: negative entropy on the corner simplex {x >= 0, sum x <= 1},
/// with the slack 1 - sum x treated as an extra coordinate; modulus 1 w.r.t.
/// the l1 norm.
struct MirrorStructure {
  MirrorKind kind = MirrorKind::Euclidean;
  double modulus = 1.0;

  static MirrorStructure euclidean() { return {MirrorKind::Euclidean, 1.0}; }
  static MirrorStructure entropic() { return {MirrorKind::Entropic, 1.0}; }
};

/// D(p, x) = psi(p) - psi(x) - <grad psi(x), p - x>.
/// Throws DomainError for points outside dom psi (nonpositive entries or
/// slack under the entropic structure).
double bregman(const MirrorStructure& s, std::span<const double> p, std::span<const double> x);

/// True when `set` is {x >= 0, sum x <= 1} (box upper bounds >= 1, one
/// all-ones halfspace with offset 1), the only domain the entropic
/// structure supports.
bool is_corner_simplex(const FeasibleSet& set);

/// Mirror-descent step with a pre-scaled dual vector y (= step * estimate):
///   argmin_{x' in set} { <y, x' - x> + D(x', x) }.
/// For the Euclidean structure this is the projection of x - y onto the set;
/// for the entropic one it is the multiplicative update x'_j ~ x_j e^{-y_j}.
Vector prox_step(const MirrorStructure& s, const FeasibleSet& set, std::span<const double> x,
                 std::span<const double> y, const ProjectionOptions& opts = {});
void prox_step_into(const MirrorStructure& s, const FeasibleSet& set, std::span<const double> x,
                    std::span<const double> y, std::span<double> out,
                    const ProjectionOptions& opts = {});

}  // namespace bmd
