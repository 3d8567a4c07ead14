// AArch64 only; NEON is baseline there so no runtime probe is needed.
#include <arm_neon.h>

#include "bmd/kernels.hpp"

namespace bmd::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sqdist_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void blend_neon(double t, const double* a, const double* b, double* out, std::size_t n) {
  const double s = 1.0 - t;
  const float64x2_t vs = vdupq_n_f64(s);
  const float64x2_t vt = vdupq_n_f64(t);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vfmaq_f64(vmulq_f64(vt, vld1q_f64(b + i)), vs, vld1q_f64(a + i)));
  for (; i < n; ++i) out[i] = s * a[i] + t * b[i];
}

void affine_residuals_neon(const double* rows, const double* rhs, const double* x, double* out,
                           std::size_t m, std::size_t n) {
  for (std::size_t r = 0; r < m; ++r) out[r] = dot_neon(rows + r * n, x, n) - rhs[r];
}

constexpr Table kNeon{Target::Neon, dot_neon, sqdist_neon, axpy_neon, blend_neon,
                      affine_residuals_neon};

}  // namespace

namespace detail {
const Table* neon_table() { return &kNeon; }
}  // namespace detail

}  // namespace bmd::kernels
