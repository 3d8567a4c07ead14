#include "bmd/kernels.hpp"

namespace bmd::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void blend_scalar(double t, const double* a, const double* b, double* out, std::size_t n) {
  const double s = 1.0 - t;
  for (std::size_t i = 0; i < n; ++i) out[i] = s * a[i] + t * b[i];
}

void affine_residuals_scalar(const double* rows, const double* rhs, const double* x,
                             double* out, std::size_t m, std::size_t n) {
  for (std::size_t r = 0; r < m; ++r) out[r] = dot_scalar(rows + r * n, x, n) - rhs[r];
}

constexpr Table kScalar{Target::Scalar, dot_scalar, sqdist_scalar, axpy_scalar, blend_scalar,
                        affine_residuals_scalar};

}  // namespace

const Table& scalar_table() { return kScalar; }

}  // namespace bmd::kernels
