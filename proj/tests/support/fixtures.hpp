#pragma once

#include <cmath>
#include <vector>

#include "bmd/quadratic_game.hpp"
#include "bmd/rng.hpp"

namespace bmd::testing {

// Three players, two dimensions each, box [-2, 2]^2, interior equilibrium
// x* = (0.5, -0.4, 0.8, 0.3, -0.6, 0.7). Same instance as
// configs/quadratic_small.json.
inline QuadraticGameSpec small_quadratic_spec() {
  QuadraticGameSpec s;
  s.dims = {2, 2, 2};
  s.matrix = {2.0,  0.3, 0.4,  -0.3, 0.2,  0.1,  0.3,  1.5,  -0.2, 0.5, 0.0, -0.4,
              -0.3, 0.2, 1.8,  -0.2, 0.3,  0.2,  0.4,  -0.5, -0.2, 2.2, -0.1, 0.3,
              0.1,  0.3, -0.4, 0.2,  2.5,  0.4,  -0.2, 0.2,  0.3,  -0.3, 0.4, 1.6};
  s.linear = {-1.06, 0.74, -1.11, -1.17, 1.55, -0.85};
  for (int i = 0; i < 3; ++i) {
    s.sets.push_back(FeasibleSet::box(2, -2.0, 2.0));
    s.balls.push_back({{0.0, 0.0}, 1.5});
  }
  return s;
}

inline std::vector<double> small_quadratic_x_star() { return {0.5, -0.4, 0.8, 0.3, -0.6, 0.7}; }

// Two players, two dimensions each, box [-1, 1]^2 cut by x1 + x2 <= 1.2.
inline QuadraticGameSpec two_player_quadratic_spec() {
  QuadraticGameSpec s;
  s.dims = {2, 2};
  s.matrix = {1.5, 0.2, 0.3, -0.1,  //
              0.2, 1.2, 0.1, 0.4,   //
              -0.2, 0.3, 1.8, 0.1,  //
              0.1, -0.3, 0.1, 1.4};
  s.linear = {-0.4, 0.3, 0.5, -0.2};
  for (int i = 0; i < 2; ++i) {
    s.sets.emplace_back(Vector{-1.0, -1.0}, Vector{1.0, 1.0}, std::vector<Halfspace>{{{1.0, 1.0}, 1.2}});
    s.balls.push_back({{0.0, 0.0}, 0.8});
  }
  return s;
}

// Random 2-D box with one or two halfspaces that keep an interior point.
struct RandomPolygon {
  FeasibleSet set;
  std::vector<double> inside;
};

inline RandomPolygon random_polygon(RandomStream& rng) {
  for (;;) {
    const double lx = rng.uniform(-2.0, 0.0), ly = rng.uniform(-2.0, 0.0);
    const double ux = lx + rng.uniform(0.5, 3.0), uy = ly + rng.uniform(0.5, 3.0);
    const std::vector<double> c{0.5 * (lx + ux), 0.5 * (ly + uy)};
    std::vector<Halfspace> hs;
    const int m = 1 + static_cast<int>(rng.uniform() * 2.0);
    for (int r = 0; r < m; ++r) {
      const double angle = rng.uniform(0.0, 6.283185307179586);
      const Vector a{std::cos(angle), std::sin(angle)};
      // Offset keeps the box centre strictly inside.
      hs.push_back({a, a[0] * c[0] + a[1] * c[1] + rng.uniform(0.05, 1.0)});
    }
    return {FeasibleSet({lx, ly}, {ux, uy}, hs), c};
  }
}

// Grid oracle for the projection of z onto a 2-D set. A point outside the
// set projects onto the boundary, so each constraint line is sampled on a
// 1-D grid (feasible points only) and the grid is refined around the best
// sample; the distance along a line is convex, so the window keeps the
// minimizer. Resolution far below 1e-6.
inline std::vector<double> grid_projection(const FeasibleSet& set, const std::vector<double>& z) {
  if (set.contains(z, 0.0)) return z;
  std::vector<std::pair<std::vector<double>, double>> lines;  // normal, offset
  lines.push_back({{1.0, 0.0}, set.upper()[0]});
  lines.push_back({{-1.0, 0.0}, -set.lower()[0]});
  lines.push_back({{0.0, 1.0}, set.upper()[1]});
  lines.push_back({{0.0, -1.0}, -set.lower()[1]});
  for (const auto& h : set.halfspaces()) lines.push_back({h.normal, h.offset});

  const double span = std::hypot(set.upper()[0] - set.lower()[0], set.upper()[1] - set.lower()[1]);
  std::vector<double> best{NAN, NAN};
  double best_d = INFINITY;
  for (const auto& [a, b] : lines) {
    const double na = std::hypot(a[0], a[1]);
    const double cx = 0.5 * (set.lower()[0] + set.upper()[0]), cy = 0.5 * (set.lower()[1] + set.upper()[1]);
    // Foot of the box centre on the line, and the line direction.
    const double off = (a[0] * cx + a[1] * cy - b) / (na * na);
    const double x0 = cx - off * a[0], y0 = cy - off * a[1];
    const double ex = -a[1] / na, ey = a[0] / na;
    double lo = -span, hi = span;
    constexpr int g = 1000;
    for (int level = 0; level < 12; ++level) {
      const double h = (hi - lo) / g;
      double line_d = INFINITY, line_t = NAN;
      for (int i = 0; i <= g; ++i) {
        const double t = lo + h * i;
        const std::vector<double> p{x0 + t * ex, y0 + t * ey};
        if (!set.contains(p, 1e-12)) continue;
        const double d = (p[0] - z[0]) * (p[0] - z[0]) + (p[1] - z[1]) * (p[1] - z[1]);
        if (d < line_d) line_d = d, line_t = t;
      }
      if (std::isnan(line_t)) break;
      const std::vector<double> p{x0 + line_t * ex, y0 + line_t * ey};
      if (line_d < best_d) best_d = line_d, best = p;
      lo = line_t - 2.0 * h;
      hi = line_t + 2.0 * h;
    }
  }
  return best;
}

}  // namespace bmd::testing
