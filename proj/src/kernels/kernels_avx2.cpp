// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "bmd/kernels.hpp"

namespace bmd::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sqdist_avx2(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void blend_avx2(double t, const double* a, const double* b, double* out, std::size_t n) {
  const double s = 1.0 - t;
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d tb = _mm256_mul_pd(vt, _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(a + i), tb));
  }
  for (; i < n; ++i) out[i] = s * a[i] + t * b[i];
}

void affine_residuals_avx2(const double* rows, const double* rhs, const double* x, double* out,
                           std::size_t m, std::size_t n) {
  if (n == 4) {
    // One register per row: the common case for four-slot thermal profiles.
    const __m256d vx = _mm256_loadu_pd(x);
    for (std::size_t r = 0; r < m; ++r)
      out[r] = hsum(_mm256_mul_pd(_mm256_loadu_pd(rows + 4 * r), vx)) - rhs[r];
    return;
  }
  for (std::size_t r = 0; r < m; ++r) out[r] = dot_avx2(rows + r * n, x, n) - rhs[r];
}

constexpr Table kAvx2{Target::Avx2, dot_avx2, sqdist_avx2, axpy_avx2, blend_avx2,
                      affine_residuals_avx2};

}  // namespace

namespace detail {
const Table* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace bmd::kernels
