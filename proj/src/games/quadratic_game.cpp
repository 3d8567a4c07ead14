#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "bmd/errors.hpp"
#include "bmd/kernels.hpp"
#include "bmd/quadratic_game.hpp"

namespace bmd {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<InteriorBall> balls_or_default(const QuadraticGameSpec& spec) {
  if (!spec.balls.empty()) return spec.balls;
  std::vector<InteriorBall> out;
  for (const auto& s : spec.sets) out.push_back(find_interior_ball(s));
  return out;
}

QuadraticGameSpec checked(QuadraticGameSpec spec) {
  if (spec.dims.size() != spec.sets.size())
    throw ConfigError("quadratic game: dims and feasible sets disagree on the player count");
  std::size_t n = 0;
  for (std::size_t i = 0; i < spec.dims.size(); ++i) {
    if (spec.dims[i] == 0 || spec.sets[i].dim() != spec.dims[i])
      throw ConfigError("quadratic game: feasible set of player " + std::to_string(i) +
                        " has the wrong dimension");
    n += spec.dims[i];
  }
  if (spec.matrix.size() != n * n) throw ConfigError("quadratic game: matrix must be n x n");
  if (spec.linear.size() != n) throw ConfigError("quadratic game: linear term must have n entries");
  return spec;
}

}  // namespace

QuadraticGame::QuadraticGame(QuadraticGameSpec spec)
    : Game(checked(spec).sets, balls_or_default(spec)), spec_(std::move(spec)) {
  const std::size_t n = layout().total();
  Eigen::Map<const RowMajor> a(spec_.matrix.data(), n, n);

  for (std::size_t i = 0; i < players(); ++i) {
    const auto off = static_cast<Eigen::Index>(layout().offset(i));
    const auto d = static_cast<Eigen::Index>(layout().dim(i));
    const auto blk = a.block(off, off, d, d);
    if ((blk - blk.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError("quadratic game: diagonal block A_ii of player " + std::to_string(i) +
                        " must be symmetric");
  }

  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  mu_ = eig.eigenvalues().minCoeff();
  if (!(mu_ > 0.0))
    throw ConfigError("quadratic game: symmetric part of the stacked Jacobian is not positive definite "
                      "(min eigenvalue " + std::to_string(mu_) + ")");

  // ||A||_2 by power iteration on A'A.
  const Eigen::MatrixXd ata = a.transpose() * a;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd w = ata * v;
    const double next = w.norm();
    if (next == 0.0) break;
    v = w / next;
    if (std::abs(next - lambda) <= 1e-14 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  lipschitz_ = std::sqrt(lambda);
}

double QuadraticGame::objective(std::size_t i, std::span<const double> x) const {
  const std::size_t n = layout().total();
  const std::size_t off = layout().offset(i);
  const std::size_t d = layout().dim(i);
  double value = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    const double* row = spec_.matrix.data() + (off + r) * n;
    // Coupling terms in full, the own-block quadratic halved.
    double coupled = kernels::active().dot(row, x.data(), n);
    const double own = kernels::active().dot(row + off, x.data() + off, d);
    coupled -= 0.5 * own;
    value += x[off + r] * coupled + spec_.linear[off + r] * x[off + r];
  }
  return value;
}

void QuadraticGame::pseudo_gradient(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = layout().total();
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < n; ++r) out[r] = k.dot(spec_.matrix.data() + r * n, x.data(), n) + spec_.linear[r];
}

double QuadraticGame::oracle_step() const { return mu_ / (lipschitz_ * lipschitz_); }

}  // namespace bmd
