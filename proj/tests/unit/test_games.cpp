#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "bmd/errors.hpp"
#include "bmd/kernels.hpp"
#include "bmd/oracle.hpp"
#include "bmd/quadratic_game.hpp"
#include "bmd/schedules.hpp"
#include "bmd/thermal_game.hpp"
#include "fixtures.hpp"

using namespace bmd;

namespace {

// Straight-line re-implementation of the thermal cost, kept deliberately
// naive: explicit loops, direct log(sum(exp)) without shifting.
double naive_v(const std::vector<std::size_t>& members, const std::vector<double>& x, std::size_t T, double C) {
  double acc = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double s = 0.0;
    for (auto l : members) s += x[l * T + t];
    acc += std::exp(C * s);
  }
  return std::log(acc) / C;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double naive_cost(std::size_t i, const std::vector<double>& x, const ThermalGameSpec& s) {
  const std::size_t T = s.slots;
  double cost = 0.0;
  for (std::size_t t = 0; t < T; ++t) cost += s.price_energy[t] * x[i * T + t] + s.lambda[i][t] * x[i * T + t] * x[i * T + t];
  const int N = static_cast<int>(s.buildings);
  for (const auto& c : s.cliques) {
    if (std::find(c.begin(), c.end(), i) == c.end()) continue;
    const int m = static_cast<int>(c.size());
    const double w = factorial(N - m) * factorial(m - 1) / factorial(N);
    std::vector<std::size_t> rest;
    for (auto l : c)
      if (l != i) rest.push_back(l);
    cost += s.price_peak * w * (naive_v(c, x, T, s.smoothing) - naive_v(rest, x, T, s.smoothing));
  }
  return cost;
}

std::vector<double> random_feasible(const Game& g, RandomStream& rng) {
  std::vector<double> x(g.layout().total());
  for (std::size_t i = 0; i < g.players(); ++i) {
    const auto& set = g.feasible_set(i);
    auto xi = g.layout().block(std::span<double>(x), i);
    do
      for (std::size_t j = 0; j < xi.size(); ++j) xi[j] = rng.uniform(set.lower()[j], set.upper()[j]);
    while (!set.contains(xi, 0.0));
  }
  return x;
}

ThermalGameSpec tiny_thermal(std::size_t n, std::size_t T, std::vector<std::vector<std::size_t>> cliques) {
  ThermalGameSpec s;
  s.buildings = n;
  s.slots = T;
  s.price_energy.assign(T, 0.5);
  s.price_peak = 10.0;
  s.smoothing = 5.0;
  s.lambda.assign(n, std::vector<double>(T, 0.05));
  s.cliques = std::move(cliques);
  BuildingParams b;
  b.a = 0.0;
  b.comfort_lo.assign(T, 0.5);
  b.comfort_hi.assign(T, 2.5);
  s.building.assign(n, b);
  return s;
}

}  // namespace

TEST_CASE("quadratic game construction checks") {
  auto s = testing::small_quadratic_spec();
  CHECK_NOTHROW(QuadraticGame{s});
  auto bad = s;
  bad.matrix[1] = 0.9;  // A_11 no longer symmetric
  CHECK_THROWS_AS(QuadraticGame{bad}, ConfigError);
  bad = s;
  for (std::size_t r = 0; r < 6; ++r) bad.matrix[r * 6 + r] = -1.0;
  CHECK_THROWS_AS(QuadraticGame{bad}, ConfigError);
  bad = s;
  bad.balls[0].radius = 2.5;
  CHECK_THROWS_AS(QuadraticGame{bad}, ConfigError);
  bad = s;
  bad.linear.pop_back();
  CHECK_THROWS_AS(QuadraticGame{bad}, ConfigError);
  bad = s;
  bad.balls.clear();
  const QuadraticGame derived(bad);
  CHECK(derived.ball(0).radius > 0.0);
}

TEST_CASE("quadratic objective and pseudo-gradient") {
  const auto s = testing::small_quadratic_spec();
  const QuadraticGame g(s);
  RandomStream rng(4);
  for (int t = 0; t < 50; ++t) {
    auto x = random_feasible(g, rng);
    for (std::size_t i = 0; i < 3; ++i) {
      double want = 0.0;
      for (std::size_t a = 2 * i; a < 2 * i + 2; ++a) {
        for (std::size_t b = 0; b < 6; ++b) {
          const bool own = b >= 2 * i && b < 2 * i + 2;
          want += (own ? 0.5 : 1.0) * x[a] * s.matrix[a * 6 + b] * x[b];
        }
        want += s.linear[a] * x[a];
      }
      CHECK(g.objective(i, x) == doctest::Approx(want).epsilon(1e-13));
    }
    std::vector<double> f(6);
    g.pseudo_gradient(x, f);
    for (std::size_t r = 0; r < 6; ++r) {
      const std::size_t i = r / 2;
      const double h = 1e-5;
      auto xp = x, xm = x;
      xp[r] += h;
      xm[r] -= h;
      CHECK(f[r] == doctest::Approx((g.objective(i, xp) - g.objective(i, xm)) / (2 * h)).epsilon(1e-7));
    }
  }
}

TEST_CASE("oracle on the quadratic game matches a dense linear solve") {
  const auto s = testing::small_quadratic_spec();
  const QuadraticGame g(s);
  const auto r = solve_critical_point(g);
  Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>> A(s.matrix.data());
  Eigen::Map<const Eigen::Matrix<double, 6, 1>> b(s.linear.data());
  const Eigen::Matrix<double, 6, 1> x = A.partialPivLu().solve(-b);
  for (int j = 0; j < 6; ++j) CHECK(std::abs(r.x_star[j] - x[j]) < 1e-8);
  CHECK(r.vi_residual < 1e-9);
  CHECK_FALSE(r.potential.has_value());
}

TEST_CASE("oracle with identity matrix returns the clipped target") {
  QuadraticGameSpec s;
  s.dims = {2, 1};
  s.matrix = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  const std::vector<double> c{0.4, 3.0, -0.2};
  s.linear = {-c[0], -c[1], -c[2]};
  s.sets = {FeasibleSet::box(2, -1.0, 1.0), FeasibleSet::box(1, -1.0, 1.0)};
  const QuadraticGame g(s);
  const auto r = solve_critical_point(g);
  CHECK(r.x_star[0] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(r.x_star[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.x_star[2] == doctest::Approx(-0.2).epsilon(1e-9));
}

TEST_CASE("oracle non-convergence reports the residual") {
  const QuadraticGame g(testing::small_quadratic_spec());
  try {
    solve_critical_point(g, 1e-10, 3);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.residual() > 1e-10);
  }
}

TEST_CASE("log-sum-exp value") {
  const std::vector<double> x{0.3, 1.2, 2.0, 0.7};  // two buildings, two slots
  const std::vector<std::size_t> both{0, 1};
  std::vector<double> one_slot{0.3, 1.2};
  CHECK(lse_value(both, one_slot, 1, 10.0) == doctest::Approx(1.5).epsilon(1e-15));
  const std::vector<double> flat{0.5, 0.5, 1.0, 1.0};
  CHECK(lse_value(both, flat, 2, 4.0) == doctest::Approx(1.5 + std::log(2.0) / 4.0).epsilon(1e-15));
  CHECK(lse_value({}, x, 2, 4.0) == doctest::Approx(std::log(2.0) / 4.0));
  // Large C stays finite and approaches the max within log(T)/C.
  const double big = lse_value(both, x, 2, 1e4);
  CHECK(std::isfinite(big));
  CHECK(big >= 2.3);
  CHECK(big <= 2.3 + std::log(2.0) / 1e4);

  RandomStream rng(6);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> y(12);
    for (double& v : y) v = rng.uniform(0, 3);
    const std::vector<std::size_t> m{0, 2};
    const double C = rng.uniform(0.5, 50.0);
    const double v = lse_value(m, y, 4, C);
    double mx = -INFINITY;
    for (std::size_t s = 0; s < 4; ++s) mx = std::max(mx, y[s] + y[8 + s]);
    CHECK(v >= mx - 1e-12);
    CHECK(v <= mx + std::log(4.0) / C);
  }
}

TEST_CASE("shapley weights") {
  CHECK(shapley_weight(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(shapley_weight(3, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  // Exact rationals with integer factorials up to 20! (fits in 64 bits).
  auto fact = [](std::uint64_t n) {
    std::uint64_t f = 1;
    for (std::uint64_t k = 2; k <= n; ++k) f *= k;
    return f;
  };
  for (std::uint64_t n = 1; n <= 20; ++n)
    for (std::uint64_t s = 1; s <= n; ++s) {
      const long double exact = static_cast<long double>(fact(n - s)) * static_cast<long double>(fact(s - 1)) /
                                static_cast<long double>(fact(n));
      const double w = shapley_weight(n, s);
      CHECK(w > 0.0);
      CHECK(w <= 1.0);
      CHECK(std::abs(w - static_cast<double>(exact)) <= 1e-12 * static_cast<double>(exact));
    }
}

TEST_CASE("shapley share examples") {
  auto s = tiny_thermal(1, 3, {{0}});
  const std::vector<double> x{1.0, 2.0, 0.5};
  CHECK(shapley_share(0, x, s) ==
        doctest::Approx(lse_value(std::vector<std::size_t>{0}, x, 3, 5.0) - std::log(3.0) / 5.0).epsilon(1e-14));
  // Building 2 in no clique contributes nothing (spec validation aside).
  auto t = tiny_thermal(3, 2, {{0, 1}});
  const std::vector<double> y{1, 1, 2, 1, 1, 2};
  CHECK(shapley_share(2, y, t) == 0.0);
  CHECK_THROWS_AS(validate_thermal_spec(t), ConfigError);
}

TEST_CASE("thermal spec validation") {
  auto s = tiny_thermal(3, 2, {{0, 1}, {1, 2}});
  CHECK_NOTHROW(validate_thermal_spec(s));
  auto bad = s;
  bad.smoothing = 0.0;
  CHECK_THROWS_AS(validate_thermal_spec(bad), ConfigError);
  bad = s;
  bad.cliques.push_back({});
  CHECK_THROWS_AS(validate_thermal_spec(bad), ConfigError);
  bad = s;
  bad.cliques[0] = {0, 5};
  CHECK_THROWS_AS(validate_thermal_spec(bad), ConfigError);
  bad = s;
  bad.cliques[0] = {0, 0, 1};
  CHECK_THROWS_AS(validate_thermal_spec(bad), ConfigError);
  bad = s;
  bad.lambda.pop_back();
  CHECK_THROWS_AS(validate_thermal_spec(bad), ConfigError);
}

TEST_CASE("thermal objective examples") {
  const auto s = default_thermal_spec();
  const std::vector<double> zero(s.buildings * s.slots, 0.0);
  for (std::size_t i = 0; i < s.buildings; ++i)
    CHECK(thermal_objective(i, zero, s) == doctest::Approx(s.price_peak * shapley_share(i, zero, s)).epsilon(1e-15));

  RandomStream rng(10);
  const ThermalGame g(s);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_feasible(g, rng);
    auto doubled = s;
    for (auto& row : doubled.lambda)
      for (double& v : row) v *= 2.0;
    std::vector<double> batch(s.buildings);
    g.objectives(x, batch);
    for (std::size_t i = 0; i < s.buildings; ++i) {
      double q = 0.0;
      for (std::size_t k = 0; k < s.slots; ++k) q += s.lambda[i][k] * x[i * s.slots + k] * x[i * s.slots + k];
      CHECK(thermal_objective(i, x, doubled) - thermal_objective(i, x, s) == doctest::Approx(q).epsilon(1e-10));
      CHECK(thermal_objective(i, x, s) == doctest::Approx(naive_cost(i, x, s)).epsilon(1e-12));
      CHECK(batch[i] == doctest::Approx(g.objective(i, x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("feasible polytope construction") {
  BuildingParams memoryless;
  memoryless.a = 0.0;
  memoryless.comfort_lo = {0.5, 1.0, 0.2};
  memoryless.comfort_hi = {2.0, 2.5, 1.0};
  auto set = build_feasible_polytope(memoryless, 3);
  CHECK(set.halfspaces().empty());
  CHECK(set.lower() == std::vector<double>{0.5, 1.0, 0.2});
  CHECK(set.upper() == std::vector<double>{2.0, 2.5, 1.0});

  BuildingParams half;
  half.a = 0.5;
  half.power_cap = 3.0;
  half.comfort_lo = {1.0, 1.0};
  half.comfort_hi = {2.0, 2.5};
  set = build_feasible_polytope(half, 2);
  CHECK(set.lower()[0] == 1.0);
  CHECK(set.upper()[0] == 2.0);
  // 0.5 x1 + x2 in [1, 2.5] survives as two rows.
  REQUIRE(set.halfspaces().size() == 2);
  for (const auto& h : set.halfspaces()) {
    if (h.normal[1] > 0) {
      CHECK(h.normal == std::vector<double>{0.5, 1.0});
      CHECK(h.offset == 2.5);
    } else {
      CHECK(h.normal == std::vector<double>{-0.5, -1.0});
      CHECK(h.offset == -1.0);
    }
  }

  BuildingParams open;
  open.comfort_lo.assign(4, -INFINITY);
  open.comfort_hi.assign(4, INFINITY);
  set = build_feasible_polytope(open, 4);
  CHECK(set.halfspaces().empty());
  CHECK(set.lower() == std::vector<double>(4, 0.0));
  CHECK(set.upper() == std::vector<double>(4, 3.0));

  BuildingParams bad = half;
  bad.b = 0.0;
  CHECK_THROWS_AS(build_feasible_polytope(bad, 2), ConfigError);
  bad = half;
  bad.comfort_lo = {5.0, 5.0};
  bad.comfort_hi = {6.0, 6.0};
  CHECK_THROWS_AS(build_feasible_polytope(bad, 2), ConfigError);
}

TEST_CASE("thermal gradient") {
  auto s = default_thermal_spec();
  const ThermalGame g(s);
  RandomStream rng(13);
  for (int t = 0; t < 20; ++t) {
    auto x = random_feasible(g, rng);
    for (std::size_t i = 0; i < s.buildings; ++i) {
      const auto grad = thermal_gradient(i, x, s);
      for (std::size_t k = 0; k < s.slots; ++k) {
        const double h = 1e-5;
        auto xp = x, xm = x;
        xp[i * s.slots + k] += h;
        xm[i * s.slots + k] -= h;
        const double fd = (thermal_objective(i, xp, s) - thermal_objective(i, xm, s)) / (2 * h);
        CHECK(std::abs(grad[k] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
    std::vector<double> f(x.size());
    g.pseudo_gradient(x, f);
    for (std::size_t i = 0; i < s.buildings; ++i) {
      const auto gi = thermal_gradient(i, x, s);
      for (std::size_t k = 0; k < s.slots; ++k) CHECK(f[i * s.slots + k] == doctest::Approx(gi[k]).epsilon(1e-14));
    }
  }
  auto off = s;
  off.price_peak = 0.0;
  const auto x = random_feasible(g, rng);
  const auto grad = thermal_gradient(3, x, off);
  for (std::size_t k = 0; k < s.slots; ++k)
    CHECK(grad[k] == s.price_energy[k] + 2.0 * s.lambda[3][k] * x[3 * s.slots + k]);

  auto single = tiny_thermal(3, 1, {{0, 1}, {1, 2}, {0, 1, 2}});
  single.price_energy = {0.0};
  single.lambda.assign(3, {0.0});
  const std::vector<double> y{1.0, 2.0, 0.5};
  const auto g1 = thermal_gradient(1, y, single);
  CHECK(g1[0] == doctest::Approx(single.price_peak * (2 * shapley_weight(3, 2) + shapley_weight(3, 3))).epsilon(1e-15));
}

TEST_CASE("potential game identity and potential values") {
  const auto s = default_thermal_spec();
  const ThermalGame g(s);
  RandomStream rng(14);
  for (int t = 0; t < 20; ++t) {
    auto x = random_feasible(g, rng);
    std::vector<double> f(x.size());
    g.pseudo_gradient(x, f);
    for (std::size_t r = 0; r < x.size(); ++r) {
      const double h = 1e-5;
      auto xp = x, xm = x;
      xp[r] += h;
      xm[r] -= h;
      const double fd = (potential_value(xp, s) - potential_value(xm, s)) / (2 * h);
      CHECK(std::abs(f[r] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
  const std::vector<double> zero(s.buildings * s.slots, 0.0);
  double want = 0.0;
  for (const auto& c : s.cliques) want += shapley_weight(s.buildings, c.size()) * std::log(4.0) / s.smoothing;
  CHECK(potential_value(zero, s) == doctest::Approx(s.price_peak * want).epsilon(1e-14));
}

TEST_CASE("without the peak term the potential separates") {
  auto s = tiny_thermal(2, 3, {{0, 1}});
  s.price_peak = 0.0;
  s.price_energy = {-0.3, 0.1, -0.05};
  s.lambda = {{0.1, 0.2, 0.05}, {0.3, 0.05, 0.1}};
  const ThermalGame g(s);
  const auto r = solve_critical_point(g);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 3; ++k) {
      const double unconstrained = -s.price_energy[k] / (2.0 * s.lambda[i][k]);
      const double want = std::clamp(unconstrained, 0.5, 2.5);
      CHECK(r.x_star[i * 3 + k] == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("oracle on the default thermal instance") {
  const auto s = default_thermal_spec();
  const ThermalGame g(s);
  const auto r = solve_critical_point(g);
  REQUIRE(r.potential.has_value());
  CHECK(r.vi_residual < 1e-10);
  CHECK(g.contains(r.x_star));
  RandomStream rng(15);
  for (int t = 0; t < 100; ++t) CHECK(*r.potential <= potential_value(random_feasible(g, rng), s));
}

TEST_CASE("default instance sanity") {
  const auto s = default_thermal_spec();
  CHECK(s.buildings == 20);
  CHECK(s.slots == 4);
  for (const auto& row : s.lambda)
    for (double v : row) {
      CHECK(v >= 0.04);
      CHECK(v <= 0.06);
    }
  CHECK(default_thermal_spec(7).lambda == s.lambda);
  CHECK(default_thermal_spec(8).lambda != s.lambda);
  const ThermalGame g(s);
  CHECK(query_radius(ScheduleParams{}, 1) <= g.min_ball_radius());
}
