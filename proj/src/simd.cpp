#include "steinfield/simd.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace steinfield::simd {

// ======================= scalar reference kernels ===========================

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* a, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double max_abs(const double* a, std::size_t n) noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::fabs(a[i]);
    if (v > m) m = v;
  }
  return m;
}

double squared_distance(const double* a, const double* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void recurrence_series(const double* x, std::size_t n, const double* a,
                       const double* b, const double* g, const double* c,
                       std::size_t K, double* out) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    double prev = 0.0;   // T_{-1}
    double cur = 1.0;    // T_0
    double acc = c[0];
    const double xi = x[i];
    for (std::size_t k = 0; k < K; ++k) {
      const double next = (a[k] * xi + b[k]) * cur + g[k] * prev;
      prev = cur;
      cur = next;
      acc += c[k + 1] * cur;
    }
    out[i] = acc;
  }
}

}  // namespace scalar

// ============================ dispatch table ================================

namespace {

struct Dispatch {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  double (*sum)(const double*, std::size_t) noexcept;
  double (*max_abs)(const double*, std::size_t) noexcept;
  double (*squared_distance)(const double*, const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  void (*recurrence_series)(const double*, std::size_t, const double*,
                            const double*, const double*, const double*,
                            std::size_t, double*) noexcept;
};

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Dispatch make_dispatch() noexcept {
  bool want_avx2 = avx2_compiled() && cpu_has_avx2();
  if (const char* env = std::getenv("STEINFIELD_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) want_avx2 = false;
    // "avx2" keeps the automatic choice but never forces an unsupported path.
  }
  if (want_avx2) {
    return {Isa::avx2,         avx2::dot,  avx2::sum,
            avx2::max_abs,     avx2::squared_distance,
            avx2::axpy,        avx2::recurrence_series};
  }
  return {Isa::scalar,         scalar::dot,  scalar::sum,
          scalar::max_abs,     scalar::squared_distance,
          scalar::axpy,        scalar::recurrence_series};
}

const Dispatch& table() noexcept {
  static const Dispatch d = make_dispatch();
  return d;
}

}  // namespace

Isa active_isa() noexcept { return table().isa; }

const char* isa_name() noexcept {
  return table().isa == Isa::avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
  return table().dot(a, b, n);
}
double sum(const double* a, std::size_t n) noexcept { return table().sum(a, n); }
double max_abs(const double* a, std::size_t n) noexcept {
  return table().max_abs(a, n);
}
double squared_distance(const double* a, const double* b, std::size_t n) noexcept {
  return table().squared_distance(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  table().axpy(alpha, x, y, n);
}
void recurrence_series(const double* x, std::size_t n, const double* a,
                       const double* b, const double* g, const double* c,
                       std::size_t K, double* out) noexcept {
  table().recurrence_series(x, n, a, b, g, c, K, out);
}

}  // namespace steinfield::simd
