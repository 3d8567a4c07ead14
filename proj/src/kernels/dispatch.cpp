#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "bmd/kernels.hpp"

namespace bmd::kernels {

namespace detail {
#ifndef BMD_BUILD_AVX2
const Table* avx2_table() { return nullptr; }
#endif
#ifndef BMD_BUILD_NEON
const Table* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(BMD_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* table_for(Target t) {
  switch (t) {
    case Target::Scalar:
      return &scalar_table();
    case Target::Avx2:
      return cpu_has_avx2() ? detail::avx2_table() : nullptr;
    case Target::Neon:
      return detail::neon_table();
  }
  return nullptr;
}

const Table* best_table() {
  if (const char* env = std::getenv("BMD_KERNELS")) {
    const std::string want(env);
    for (Target t : {Target::Scalar, Target::Avx2, Target::Neon})
      if (want == name(t))
        if (const Table* tab = table_for(t)) return tab;
  }
  if (const Table* t = table_for(Target::Avx2)) return t;
  if (const Table* t = table_for(Target::Neon)) return t;
  return &scalar_table();
}

std::atomic<const Table*>& slot() {
  static std::atomic<const Table*> current{best_table()};
  return current;
}

}  // namespace

std::string_view name(Target t) {
  switch (t) {
    case Target::Scalar:
      return "scalar";
    case Target::Avx2:
      return "avx2";
    case Target::Neon:
      return "neon";
  }
  return "unknown";
}

bool available(Target t) { return table_for(t) != nullptr; }

std::vector<Target> available_targets() {
  std::vector<Target> out;
  for (Target t : {Target::Scalar, Target::Avx2, Target::Neon})
    if (available(t)) out.push_back(t);
  return out;
}

const Table& active() { return *slot().load(std::memory_order_acquire); }

void select(Target t) {
  const Table* tab = table_for(t);
  if (!tab) throw std::invalid_argument("kernel target not available: " + std::string(name(t)));
  slot().store(tab, std::memory_order_release);
}

void select_best() { slot().store(best_table(), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().squared_distance(a.data(), b.data(), a.size());
}

double norm2(std::span<const double> a) { return std::sqrt(active().dot(a.data(), a.data(), a.size())); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void blend(double t, std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  active().blend(t, a.data(), b.data(), out.data(), a.size());
}

}  // namespace bmd::kernels
