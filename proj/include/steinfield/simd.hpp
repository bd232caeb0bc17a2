#pragma once

#include <cstddef>

// =============================================================================
// Small vector kernels with runtime ISA dispatch.
//
// Scalar reference implementations always exist; an AVX2+FMA variant is
// selected at startup when the CPU supports it. The environment variable
// STEINFIELD_SIMD=scalar|avx2 overrides the automatic choice (useful for
// equivalence testing and for reproducing results across machines).
// =============================================================================

namespace steinfield::simd {

enum class Isa { scalar, avx2 };

// ISA picked at first use (cpuid + STEINFIELD_SIMD override); stable afterwards.
Isa active_isa() noexcept;
const char* isa_name() noexcept;
bool avx2_compiled() noexcept;

double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
double max_abs(const double* a, std::size_t n) noexcept;
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;

// Weighted three-term-recurrence series, evaluated lane-parallel over x:
//
//   out[i] = sum_{k=0}^{K} c[k] * T_k(x[i]),
//   T_{-1} = 0,  T_0 = 1,  T_{k+1}(x) = (a[k]*x + b[k]) * T_k(x) + g[k] * T_{k-1}(x).
//
// Covers Chebyshev (a = {1,2,2,...}, b = 0, g = -1) and Gegenbauer
// (a[k] = 2(k+lam)/(k+1), g[k] = -(k+2lam-1)/(k+1)) kernels alike; the
// coefficient arrays a, b, g have K entries, c has K+1.
void recurrence_series(const double* x, std::size_t n, const double* a,
                       const double* b, const double* g, const double* c,
                       std::size_t K, double* out) noexcept;

// Scalar reference entry points (always available, used by equivalence tests).
namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
double max_abs(const double* a, std::size_t n) noexcept;
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void recurrence_series(const double* x, std::size_t n, const double* a,
                       const double* b, const double* g, const double* c,
                       std::size_t K, double* out) noexcept;
}  // namespace scalar

// AVX2 entry points; valid to call only when avx2_compiled() and the CPU
// supports AVX2 (the dispatcher guarantees this for the top-level functions).
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
double max_abs(const double* a, std::size_t n) noexcept;
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void recurrence_series(const double* x, std::size_t n, const double* a,
                       const double* b, const double* g, const double* c,
                       std::size_t K, double* out) noexcept;
}  // namespace avx2

}  // namespace steinfield::simd
