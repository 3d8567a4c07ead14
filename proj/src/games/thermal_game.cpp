#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bmd/errors.hpp"
#include "bmd/kernels.hpp"
#include "bmd/rng.hpp"
#include "bmd/thermal_game.hpp"

namespace bmd {
namespace {

// (1/C) log sum_t exp(C s_t), stabilized by the largest exponent.
double lse_of_sums(std::span<const double> sums, double smoothing) {
  double top = -std::numeric_limits<double>::infinity();
  for (double s : sums) top = std::max(top, smoothing * s);
  double acc = 0.0;
  for (double s : sums) acc += std::exp(smoothing * s - top);
  return (top + std::log(acc)) / smoothing;
}

void softmax_of_sums(std::span<const double> sums, double smoothing, std::span<double> out) {
  double top = -std::numeric_limits<double>::infinity();
  for (double s : sums) top = std::max(top, smoothing * s);
  double acc = 0.0;
  for (std::size_t t = 0; t < sums.size(); ++t) {
    out[t] = std::exp(smoothing * sums[t] - top);
    acc += out[t];
  }
  for (double& v : out) v /= acc;
}

void slot_sums(std::span<const std::size_t> members, std::span<const double> x, std::size_t slots,
               std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t l : members) kernels::axpy(1.0, x.subspan(l * slots, slots), out);
}

double private_cost(std::size_t i, std::span<const double> x, const ThermalGameSpec& spec) {
  const auto xi = x.subspan(i * spec.slots, spec.slots);
  double v = kernels::dot(spec.price_energy, xi);
  for (std::size_t t = 0; t < spec.slots; ++t) v += spec.lambda[i][t] * xi[t] * xi[t];
  return v;
}

bool is_member(const std::vector<std::size_t>& clique, std::size_t i) {
  return std::find(clique.begin(), clique.end(), i) != clique.end();
}

std::vector<FeasibleSet> make_sets(const ThermalGameSpec& spec) {
  validate_thermal_spec(spec);
  std::vector<FeasibleSet> sets;
  for (const auto& b : spec.building) sets.push_back(build_feasible_polytope(b, spec.slots));
  return sets;
}

std::vector<InteriorBall> make_balls(const ThermalGameSpec& spec) {
  if (!spec.balls.empty()) return spec.balls;
  std::vector<InteriorBall> balls;
  for (const auto& s : make_sets(spec)) balls.push_back(find_interior_ball(s));
  return balls;
}

}  // namespace

ThermalGameSpec default_thermal_spec(std::uint64_t lambda_seed) {
  ThermalGameSpec spec;
  spec.buildings = 20;
  spec.slots = 4;
  spec.price_energy = {0.30, 0.45, 0.80, 0.60};
  spec.price_peak = 1000.0;
  spec.smoothing = 10.0;
  spec.cliques = {{0, 1, 2},
                  {3, 4, 5, 6},
                  {7, 8, 9, 10, 11},
                  {12, 13, 14, 15, 16, 17},
                  {18, 19, 0, 3, 7, 12, 1},
                  {2, 4, 8, 13, 18, 5, 9, 14}};
  RandomStream rng(lambda_seed, "lambda", 0);
  spec.lambda.assign(spec.buildings, Vector(spec.slots));
  for (auto& row : spec.lambda)
    for (double& v : row) v = rng.uniform(0.04, 0.06);
  BuildingParams b;
  b.comfort_lo.assign(spec.slots, 1.0);
  b.comfort_hi.assign(spec.slots, 5.0);
  spec.building.assign(spec.buildings, b);
  return spec;
}

void validate_thermal_spec(const ThermalGameSpec& spec) {
  const std::size_t n = spec.buildings, t = spec.slots;
  if (n == 0 || t == 0) throw ConfigError("thermal game: need at least one building and one slot");
  if (spec.price_energy.size() != t) throw ConfigError("thermal game: price_energy needs one entry per slot");
  if (!(spec.smoothing > 0.0)) throw ConfigError("thermal game: smoothing constant C must be positive");
  if (!(spec.price_peak >= 0.0)) throw ConfigError("thermal game: price_peak must be nonnegative");
  if (spec.lambda.size() != n) throw ConfigError("thermal game: lambda needs one row per building");
  for (const auto& row : spec.lambda)
    if (row.size() != t) throw ConfigError("thermal game: lambda rows need one entry per slot");
  if (spec.building.size() != n) throw ConfigError("thermal game: need parameters for every building");
  if (!spec.balls.empty() && spec.balls.size() != n)
    throw ConfigError("thermal game: balls must be omitted or given for every building");
  std::vector<bool> covered(n, false);
  for (std::size_t j = 0; j < spec.cliques.size(); ++j) {
    const auto& c = spec.cliques[j];
    if (c.empty()) throw ConfigError("thermal game: clique " + std::to_string(j) + " is empty");
    for (std::size_t l : c) {
      if (l >= n) throw ConfigError("thermal game: clique " + std::to_string(j) + " names an unknown building");
      covered[l] = true;
    }
    auto sorted = c;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("thermal game: clique " + std::to_string(j) + " repeats a building");
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!covered[i]) throw ConfigError("thermal game: building " + std::to_string(i) + " belongs to no clique");
}

double shapley_weight(std::size_t players, std::size_t clique_size) {
  const double n = static_cast<double>(players), s = static_cast<double>(clique_size);
  return std::exp(std::lgamma(n - s + 1.0) + std::lgamma(s) - std::lgamma(n + 1.0));
}

double lse_value(std::span<const std::size_t> members, std::span<const double> x, std::size_t slots,
                 double smoothing) {
  thread_local Vector sums;
  sums.resize(slots);
  slot_sums(members, x, slots, sums);
  return lse_of_sums(sums, smoothing);
}

double shapley_share(std::size_t i, std::span<const double> x, const ThermalGameSpec& spec) {
  const std::size_t n = spec.buildings;
  double share = 0.0;
  for (const auto& clique : spec.cliques) {
    if (!is_member(clique, i)) continue;
    std::vector<std::size_t> without;
    for (std::size_t l : clique)
      if (l != i) without.push_back(l);
    share += shapley_weight(n, clique.size()) *
             (lse_value(clique, x, spec.slots, spec.smoothing) -
              lse_value(without, x, spec.slots, spec.smoothing));
  }
  return share;
}

double thermal_objective(std::size_t i, std::span<const double> x, const ThermalGameSpec& spec) {
  return private_cost(i, x, spec) + spec.price_peak * shapley_share(i, x, spec);
}

Vector thermal_gradient(std::size_t i, std::span<const double> x, const ThermalGameSpec& spec) {
  const std::size_t slots = spec.slots;
  Vector g(slots), sums(slots), soft(slots);
  const auto xi = x.subspan(i * slots, slots);
  for (std::size_t t = 0; t < slots; ++t) g[t] = spec.price_energy[t] + 2.0 * spec.lambda[i][t] * xi[t];
  for (const auto& clique : spec.cliques) {
    if (!is_member(clique, i)) continue;
    slot_sums(clique, x, slots, sums);
    softmax_of_sums(sums, spec.smoothing, soft);
    kernels::axpy(spec.price_peak * shapley_weight(spec.buildings, clique.size()), soft, g);
  }
  return g;
}

double potential_value(std::span<const double> x, const ThermalGameSpec& spec) {
  double v = 0.0;
  for (std::size_t i = 0; i < spec.buildings; ++i) v += private_cost(i, x, spec);
  double peak = 0.0;
  for (const auto& clique : spec.cliques)
    peak += shapley_weight(spec.buildings, clique.size()) * lse_value(clique, x, spec.slots, spec.smoothing);
  return v + spec.price_peak * peak;
}

FeasibleSet build_feasible_polytope(const BuildingParams& p, std::size_t slots) {
  if (p.b == 0.0 || p.c == 0.0) throw ConfigError("thermal building: b and c must be nonzero");
  if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c) || !std::isfinite(p.r0))
    throw ConfigError("thermal building: dynamics parameters must be finite");
  if (!(p.power_cap > 0.0) || !std::isfinite(p.power_cap))
    throw ConfigError("thermal building: power cap must be positive and finite");
  const auto bound = [&](const Vector& v, std::size_t t, double fallback) {
    return v.empty() ? fallback : v.at(t);
  };
  if ((!p.comfort_lo.empty() && p.comfort_lo.size() != slots) ||
      (!p.comfort_hi.empty() && p.comfort_hi.size() != slots))
    throw ConfigError("thermal building: comfort bounds need one entry per slot");

  std::vector<Halfspace> rows;
  for (std::size_t t = 0; t < slots; ++t) {
    // y_t = c a^{t+1} r0 + sum_{s <= t} c b a^{t-s} x_s  (0-based slots)
    const double free_part = p.c * std::pow(p.a, static_cast<double>(t + 1)) * p.r0;
    Vector g(slots, 0.0);
    for (std::size_t s = 0; s <= t; ++s) g[s] = p.c * p.b * std::pow(p.a, static_cast<double>(t - s));
    const double hi = bound(p.comfort_hi, t, std::numeric_limits<double>::infinity());
    const double lo = bound(p.comfort_lo, t, -std::numeric_limits<double>::infinity());
    if (std::isfinite(hi)) rows.push_back({g, hi - free_part});
    if (std::isfinite(lo)) {
      Vector neg(slots);
      for (std::size_t s = 0; s < slots; ++s) neg[s] = -g[s];
      rows.push_back({std::move(neg), free_part - lo});
    }
  }
  // Rows with zero normals (a = 0 beyond the diagonal cannot produce them,
  // but c * b * a^k may underflow) are vacuous or infeasible.
  std::vector<Halfspace> kept;
  for (auto& h : rows) {
    bool zero = std::all_of(h.normal.begin(), h.normal.end(), [](double v) { return v == 0.0; });
    if (!zero) {
      kept.push_back(std::move(h));
    } else if (h.offset < 0.0) {
      throw ConfigError("thermal building: comfort band unreachable");
    }
  }
  return simplified(FeasibleSet(Vector(slots, 0.0), Vector(slots, p.power_cap), std::move(kept)));
}

ThermalGame::ThermalGame(ThermalGameSpec spec)
    : Game(make_sets(spec), make_balls(spec)), spec_(std::move(spec)) {
  memberships_.resize(spec_.buildings);
  double max_lambda = 0.0;
  for (const auto& row : spec_.lambda)
    for (double v : row) max_lambda = std::max(max_lambda, v);
  double peak_curvature = 0.0;
  for (std::size_t j = 0; j < spec_.cliques.size(); ++j) {
    const auto& c = spec_.cliques[j];
    weights_.push_back(shapley_weight(spec_.buildings, c.size()));
    for (std::size_t l : c) memberships_[l].push_back(j);
    peak_curvature += weights_.back() * static_cast<double>(c.size());
  }
  lipschitz_ = 2.0 * max_lambda + spec_.price_peak * spec_.smoothing * peak_curvature;
}

double ThermalGame::objective(std::size_t i, std::span<const double> x) const {
  return thermal_objective(i, x, spec_);
}

void ThermalGame::objectives(std::span<const double> x, std::span<double> out) const {
  const std::size_t slots = spec_.slots;
  const std::size_t nc = spec_.cliques.size();
  thread_local Vector sums, peak, reduced;
  sums.resize(nc * slots);
  peak.resize(nc);
  reduced.resize(slots);
  for (std::size_t j = 0; j < nc; ++j) {
    std::span<double> s(sums.data() + j * slots, slots);
    slot_sums(spec_.cliques[j], x, slots, s);
    peak[j] = lse_of_sums(s, spec_.smoothing);
  }
  for (std::size_t i = 0; i < spec_.buildings; ++i) {
    const auto xi = x.subspan(i * slots, slots);
    double share = 0.0;
    for (std::size_t j : memberships_[i]) {
      for (std::size_t t = 0; t < slots; ++t) reduced[t] = sums[j * slots + t] - xi[t];
      const double without = spec_.cliques[j].size() == 1 ? std::log(static_cast<double>(slots)) / spec_.smoothing
                                                           : lse_of_sums(reduced, spec_.smoothing);
      share += weights_[j] * (peak[j] - without);
    }
    out[i] = private_cost(i, x, spec_) + spec_.price_peak * share;
  }
}

void ThermalGame::pseudo_gradient(std::span<const double> x, std::span<double> out) const {
  const std::size_t slots = spec_.slots;
  const std::size_t nc = spec_.cliques.size();
  Vector soft(nc * slots), sums(slots);
  for (std::size_t j = 0; j < nc; ++j) {
    slot_sums(spec_.cliques[j], x, slots, sums);
    softmax_of_sums(sums, spec_.smoothing, std::span<double>(soft.data() + j * slots, slots));
  }
  for (std::size_t i = 0; i < spec_.buildings; ++i) {
    auto gi = out.subspan(i * slots, slots);
    const auto xi = x.subspan(i * slots, slots);
    for (std::size_t t = 0; t < slots; ++t) gi[t] = spec_.price_energy[t] + 2.0 * spec_.lambda[i][t] * xi[t];
    for (std::size_t j : memberships_[i])
      kernels::axpy(spec_.price_peak * weights_[j], std::span<const double>(soft.data() + j * slots, slots), gi);
  }
}

double ThermalGame::potential(std::span<const double> x) const { return potential_value(x, spec_); }

double ThermalGame::oracle_step() const { return 1.0 / lipschitz_; }

}  // namespace bmd
