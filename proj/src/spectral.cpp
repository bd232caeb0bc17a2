#include "steinfield/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "steinfield/errors.hpp"
#include "steinfield/simd.hpp"

namespace steinfield {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gamma((n+1)/2) / (2 pi^{(n+1)/2}) — the zonal diagonal per unit of d_k,
// equal to 1 / area(S^n).
double zonal_unit(int n) {
  return std::tgamma(0.5 * (n + 1)) / (2.0 * std::pow(kPi, 0.5 * (n + 1)));
}

double clamp_cos(double c) {
  if (!(std::fabs(c) <= 1.0 + 1e-12)) {
    throw ConfigError("zonal/kernel: cos(angle) outside [-1, 1] beyond rounding: " +
                      std::to_string(c));
  }
  return std::clamp(c, -1.0, 1.0);
}

// d_k in double precision via log-gamma; used only inside tail majorants,
// where a relative error of ~1e-14 is absorbed by a small safety factor.
double eigenspace_dim_approx(double k, int n) {
  if (k < 0.5) return 1.0;
  if (n == 1) return 2.0;
  const double log_binom = std::lgamma(n + k - 1.0) - std::lgamma(k) - std::lgamma(double(n));
  return (2.0 * k + n - 1.0) / k * std::exp(log_binom) * (1.0 + 1e-9);
}

enum class WeightKind { covariance, heat };

struct SeriesData {
  std::vector<double> a, b, g;  // recurrence coefficients, K entries
  std::vector<double> c;        // series coefficients, K+1 entries
};

// Builds the three-term recurrence (Chebyshev for n=1, Gegenbauer with
// lambda = (n-1)/2 for n>=2) together with per-degree coefficients
// c_k = [zonal normalization]_k * w_k, so that the kernel at cos(angle)=x
// is sum_k c_k T_k(x).
SeriesData build_series(const SpectralParams& p, WeightKind kind, double eps) {
  p.validate();
  const int K = p.truncation_K;
  const int n = p.dim_n;
  SeriesData s;
  s.a.resize(K);
  s.b.assign(K, 0.0);
  s.g.resize(K);
  s.c.resize(K + 1);

  if (n == 1) {
    for (int k = 0; k < K; ++k) {
      s.a[k] = (k == 0) ? 1.0 : 2.0;
      s.g[k] = -1.0;
    }
  } else {
    const double lam = 0.5 * (n - 1);
    for (int k = 0; k < K; ++k) {
      s.a[k] = 2.0 * (k + lam) / (k + 1.0);
      s.g[k] = -(k + 2.0 * lam - 1.0) / (k + 1.0);
    }
  }

  const bool constant_mode = (kind == WeightKind::heat) && p.include_constant_mode;
  s.c[0] = constant_mode ? 1.0 / sphere_area(n) : 0.0;
  const double n_iota = p.n_iota();
  for (int k = 1; k <= K; ++k) {
    double norm;
    if (n == 1) {
      norm = 1.0 / kPi;
    } else {
      norm = std::tgamma(0.5 * (n + 1)) * (2.0 * k + n - 1.0) /
             (2.0 * std::pow(kPi, 0.5 * (n + 1)) * (n - 1.0));
    }
    const double lam_k = double(eigenvalue(k, n));
    const double w = (kind == WeightKind::covariance)
                         ? std::pow(lam_k, -n_iota)
                         : std::exp(-0.5 * eps * lam_k);
    s.c[k] = norm * w;
  }
  return s;
}

std::vector<double> eval_series(const SeriesData& s, std::vector<double> x) {
  for (double& v : x) v = clamp_cos(v);
  std::vector<double> out(x.size());
  if (!x.empty()) {
    simd::recurrence_series(x.data(), x.size(), s.a.data(), s.b.data(),
                            s.g.data(), s.c.data(), s.c.size() - 1, out.data());
  }
  return out;
}

}  // namespace

void SpectralParams::validate() const {
  if (dim_n < 1) throw ConfigError("SpectralParams: dim_n >= 1 required");
  if (!(iota > 0.0)) throw ConfigError("SpectralParams: iota > 0 required");
  if (truncation_K < 1) throw ConfigError("SpectralParams: truncation_K >= 1 required");
}

long long eigenvalue(long long k, int n) {
  if (k < 0) throw ConfigError("eigenvalue: k >= 0 required");
  if (n < 1) throw ConfigError("eigenvalue: n >= 1 required");
  return k * (k + n - 1);
}

long long eigenspace_dim(long long k, int n) {
  if (k < 0) throw ConfigError("eigenspace_dim: k >= 0 required");
  if (n < 1) throw ConfigError("eigenspace_dim: n >= 1 required");
  if (k == 0) return 1;
  // binom(n+k-2, k-1) = binom(n+k-2, n-1); iterate over the smaller index.
  const long long m = n + k - 2;
  const long long r = std::min<long long>(k - 1, n - 1);
  unsigned long long binom = 1;
  for (long long i = 1; i <= r; ++i) {
    const unsigned long long num = static_cast<unsigned long long>(m - r + i);
    if (binom > 0 && num > 0 && binom > (~0ULL) / num) {
      throw NumericalError("eigenspace_dim: intermediate overflow");
    }
    binom = binom * num / i;  // exact: product of i consecutive integers
  }
  const __int128 numer = static_cast<__int128>(binom) * (2 * k + n - 1);
  if (numer % k != 0) throw NumericalError("eigenspace_dim: unexpected remainder");
  const __int128 d = numer / k;
  if (d > static_cast<__int128>(9'000'000'000'000'000'000LL)) {
    throw NumericalError("eigenspace_dim: result overflows 64-bit range");
  }
  return static_cast<long long>(d);
}

double gegenbauer(int k, double lambda_param, double x) {
  if (k < 0) throw ConfigError("gegenbauer: k >= 0 required");
  if (!(lambda_param > 0.0)) throw ConfigError("gegenbauer: lambda > 0 required");
  double prev = 0.0;  // C_{-1}
  double cur = 1.0;   // C_0
  for (int j = 0; j < k; ++j) {
    const double next = (2.0 * (j + lambda_param) / (j + 1.0)) * x * cur -
                        ((j + 2.0 * lambda_param - 1.0) / (j + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double zonal(int k, int n, double cos_angle) {
  if (n < 1) throw ConfigError("zonal: n >= 1 required");
  if (k < 1) {
    throw ConfigError(
        "zonal: degree k >= 1 required (the constant mode enters only "
        "through the heat kernel; its diagonal is zonal_diag(0, n))");
  }
  const double c = clamp_cos(cos_angle);
  if (n == 1) {
    // cos(k * angle) / pi via the Chebyshev recurrence T_k(cos angle).
    double prev = 1.0, cur = c;
    for (int j = 1; j < k; ++j) {
      const double next = 2.0 * c * cur - prev;
      prev = cur;
      cur = next;
    }
    return cur / kPi;
  }
  const double norm = std::tgamma(0.5 * (n + 1)) * (2.0 * k + n - 1.0) /
                      (2.0 * std::pow(kPi, 0.5 * (n + 1)) * (n - 1.0));
  return norm * gegenbauer(k, 0.5 * (n - 1), c);
}

double zonal_diag(int k, int n) {
  if (k < 0) throw ConfigError("zonal_diag: k >= 0 required");
  if (n < 1) throw ConfigError("zonal_diag: n >= 1 required");
  return zonal_unit(n) * double(eigenspace_dim(k, n));
}

double smoothing_covariance_cos(double cos_angle, const SpectralParams& params) {
  return smoothing_covariance_batch({cos_angle}, params)[0];
}

double smoothing_covariance(const SpherePoint& x, const SpherePoint& y,
                            const SpectralParams& params) {
  return smoothing_covariance_cos(x.coords.dot(y.coords), params);
}

double heat_kernel_cos(double cos_angle, double epsilon, const SpectralParams& params) {
  return heat_kernel_batch({cos_angle}, epsilon, params)[0];
}

double heat_kernel(const SpherePoint& x, const SpherePoint& y, double epsilon,
                   const SpectralParams& params) {
  return heat_kernel_cos(x.coords.dot(y.coords), epsilon, params);
}

std::vector<double> smoothing_covariance_batch(const std::vector<double>& cos_angles,
                                               const SpectralParams& params) {
  return eval_series(build_series(params, WeightKind::covariance, 0.0), cos_angles);
}

std::vector<double> heat_kernel_batch(const std::vector<double>& cos_angles,
                                      double epsilon, const SpectralParams& params) {
  if (!(epsilon > 0.0)) throw ConfigError("heat_kernel: epsilon > 0 required");
  return eval_series(build_series(params, WeightKind::heat, epsilon), cos_angles);
}

int truncation_level_covariance(const SpectralParams& params, double tol,
                                long long hard_cap) {
  params.validate();
  if (!(tol > 0.0)) throw ConfigError("truncation_level: tol > 0 required");
  const int n = params.dim_n;
  const double iota = params.iota;
  // d_k <= c_n k^{n-1} and lambda_k >= k^2 give the integrable majorant
  //   term_k <= zonal_unit * c_n * k^{-(1+iota)},
  // whose tail beyond K is bounded by zonal_unit * c_n * K^{-iota} / iota.
  double c_n = 0.0;
  for (int k = 1; k <= 64; ++k) {
    c_n = std::max(c_n, eigenspace_dim_approx(k, n) / std::pow(double(k), n - 1.0));
  }
  const double coef = zonal_unit(n) * c_n / iota;
  const double k_real = std::pow(coef / tol, 1.0 / iota);
  if (!(k_real < double(hard_cap))) {
    throw NumericalError(
        "truncation_level: required K " + std::to_string(k_real) +
        " exceeds hard cap " + std::to_string(hard_cap));
  }
  long long K = static_cast<long long>(std::ceil(k_real));
  if (K < 1) K = 1;
  while (K > 1 && coef * std::pow(double(K - 1), -iota) < tol) --K;
  return static_cast<int>(K);
}

int truncation_level_heat(const SpectralParams& params, double epsilon, double tol,
                          long long hard_cap) {
  params.validate();
  if (!(epsilon > 0.0)) throw ConfigError("truncation_level: epsilon > 0 required");
  if (!(tol > 0.0)) throw ConfigError("truncation_level: tol > 0 required");
  const int n = params.dim_n;
  const double unit = zonal_unit(n);
  auto term = [&](long long k) {
    return unit * eigenspace_dim_approx(double(k), n) *
           std::exp(-0.5 * epsilon * double(eigenvalue(k, n)));
  };
  // Sum explicit terms out to where they are both negligible and decaying
  // geometrically, then close the tail with the geometric remainder.
  std::vector<double> terms;
  long long M = 1;
  for (;; ++M) {
    if (M > hard_cap) {
      throw NumericalError("truncation_level: required K exceeds hard cap " +
                           std::to_string(hard_cap));
    }
    terms.push_back(term(M));
    if (M >= 2) {
      const double ratio = terms[M - 1] / terms[M - 2];
      if (terms[M - 1] < tol * 1e-6 && ratio < 0.5) break;
    }
  }
  const double remainder = terms.back() / (1.0 - terms[M - 1] / terms[M - 2]) - terms.back();
  // suffix(K) = sum_{k > K} term_k; find the smallest K with suffix < tol.
  double suffix = remainder;
  long long K = M;
  for (long long k = M; k >= 1; --k) {
    if (suffix + terms[k - 1] >= tol) {
      K = k;
      break;
    }
    suffix += terms[k - 1];
    K = k - 1;
  }
  if (K < 1) K = 1;
  return static_cast<int>(K);
}

}  // namespace steinfield
