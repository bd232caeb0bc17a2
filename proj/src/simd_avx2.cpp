#include "steinfield/simd.hpp"

// AVX2 + FMA variants. This is the only translation unit built with
// -mavx2 -mfma; the dispatcher calls into it only after a cpuid check.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace steinfield::simd {

bool avx2_compiled() noexcept { return true; }

namespace avx2 {

namespace {

inline double hsum(__m256d v) noexcept {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double hmax(__m256d v) noexcept {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, swapped));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum(const double* a, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i];
  return r;
}

double max_abs(const double* a, std::size_t n) noexcept {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(a + i)));
  double r = hmax(acc);
  for (; i < n; ++i) {
    const double v = std::fabs(a[i]);
    if (v > r) r = v;
  }
  return r;
}

double squared_distance(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    r += d * d;
  }
  return r;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void recurrence_series(const double* x, std::size_t n, const double* a,
                       const double* b, const double* g, const double* c,
                       std::size_t K, double* out) noexcept {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    __m256d prev = _mm256_setzero_pd();
    __m256d cur = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_set1_pd(c[0]);
    for (std::size_t k = 0; k < K; ++k) {
      // next = (a[k]*x + b[k])*cur + g[k]*prev
      const __m256d t = _mm256_fmadd_pd(_mm256_set1_pd(a[k]), xi, _mm256_set1_pd(b[k]));
      const __m256d next = _mm256_fmadd_pd(t, cur, _mm256_mul_pd(_mm256_set1_pd(g[k]), prev));
      prev = cur;
      cur = next;
      acc = _mm256_fmadd_pd(_mm256_set1_pd(c[k + 1]), cur, acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  if (i < n) scalar::recurrence_series(x + i, n - i, a, b, g, c, K, out + i);
}

}  // namespace avx2

}  // namespace steinfield::simd

#else  // AVX2 not available at compile time: forward to scalar.

namespace steinfield::simd {

bool avx2_compiled() noexcept { return false; }

namespace avx2 {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  return scalar::dot(a, b, n);
}
double sum(const double* a, std::size_t n) noexcept { return scalar::sum(a, n); }
double max_abs(const double* a, std::size_t n) noexcept {
  return scalar::max_abs(a, n);
}
double squared_distance(const double* a, const double* b, std::size_t n) noexcept {
  return scalar::squared_distance(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  scalar::axpy(alpha, x, y, n);
}
void recurrence_series(const double* x, std::size_t n, const double* a,
                       const double* b, const double* g, const double* c,
                       std::size_t K, double* out) noexcept {
  scalar::recurrence_series(x, n, a, b, g, c, K, out);
}

}  // namespace avx2

}  // namespace steinfield::simd

#endif
