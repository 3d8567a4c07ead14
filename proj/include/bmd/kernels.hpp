#pragma once

// Dense vector primitives used by the projection, perturbation and game
// evaluation inner loops. Each primitive has a scalar reference
// implementation and, where the host supports it, an AVX2 (x86-64) or NEON
// (AArch64) variant. The best available table is selected once at startup;
// tests may switch tables to check the variants against the reference.
//
// Vector variants reassociate reductions, so results agree with the scalar
// reference to rounding (not bit-for-bit). A single process always uses one
// table, which keeps runs reproducible on a given host.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bmd::kernels {

enum class Target { Scalar, Avx2, Neon };

std::string_view name(Target t);

struct Table {
  Target target;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = (1 - t) * a + t * b
  void (*blend)(double t, const double* a, const double* b, double* out, std::size_t n);
  // out[r] = <rows[r*n .. r*n+n), x> - rhs[r]
  void (*affine_residuals)(const double* rows, const double* rhs, const double* x,
                           double* out, std::size_t m, std::size_t n);
};

const Table& scalar_table();
bool available(Target t);
std::vector<Target> available_targets();

/// Table used by all library code.
const Table& active();

/// Switches the active table. Throws std::invalid_argument if `t` is not
/// supported on this host. Not meant to be called while runs are in flight.
void select(Target t);

/// Picks the widest supported target (honours BMD_KERNELS=scalar|avx2|neon).
void select_best();

// Span front-ends over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void blend(double t, std::span<const double> a, std::span<const double> b,
           std::span<double> out);

namespace detail {
const Table* avx2_table();
const Table* neon_table();
}  // namespace detail

}  // namespace bmd::kernels
