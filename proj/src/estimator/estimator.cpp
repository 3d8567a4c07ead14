#include <cmath>

#include "bmd/errors.hpp"
#include "bmd/estimator.hpp"
#include "bmd/kernels.hpp"

namespace bmd {

Vector sample_unit_sphere(std::size_t dim, RandomStream& rng) {
  Vector u(dim);
  sample_unit_sphere_into(u, rng);
  return u;
}

void sample_unit_sphere_into(std::span<double> out, RandomStream& rng) {
  if (out.empty()) throw DomainError("sample_unit_sphere: dimension must be positive");
  for (;;) {
    for (double& v : out) v = rng.normal();
    const double norm = kernels::norm2(out);
    if (norm > 0.0 && std::isfinite(norm)) {
      for (double& v : out) v /= norm;
      return;
    }
  }
}

Perturbation perturb(std::span<const double> x, const InteriorBall& ball, double delta,
                     std::span<const double> u) {
  Perturbation p{Vector(x.size()), Vector(x.size())};
  perturb_into(x, ball, delta, u, p.x_hat);
  const double t = delta / ball.radius;
  kernels::blend(t, x, ball.center, p.x_bar);
  return p;
}

void perturb_into(std::span<const double> x, const InteriorBall& ball, double delta,
                  std::span<const double> u, std::span<double> x_hat) {
  if (x.size() != ball.center.size() || u.size() != x.size() || x_hat.size() != x.size())
    throw DomainError("perturb: dimension mismatch");
  if (!(delta >= 0.0)) throw DomainError("perturb: query radius must be nonnegative");
  if (delta > ball.radius)
    throw DomainError("perturb: query radius exceeds the interior-ball radius");
  kernels::blend(delta / ball.radius, x, ball.center, x_hat);
  kernels::axpy(delta, u, x_hat);
}

Vector residual_estimate(double j_curr, double j_prev, std::span<const double> u, double delta,
                         std::size_t dim) {
  if (!(delta > 0.0)) throw DomainError("residual_estimate: query radius must be positive");
  const double coef = (static_cast<double>(dim) / delta) * (j_curr - j_prev);
  Vector g(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) g[j] = coef * u[j];
  return g;
}

Vector single_point_estimate(double j_curr, std::span<const double> u, double delta,
                             std::size_t dim) {
  if (!(delta > 0.0)) throw DomainError("single_point_estimate: query radius must be positive");
  const double coef = (static_cast<double>(dim) / delta) * j_curr;
  Vector g(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) g[j] = coef * u[j];
  return g;
}

}  // namespace bmd
