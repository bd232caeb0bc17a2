#include "steinfield/bounds.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "steinfield/errors.hpp"

namespace steinfield {

namespace {

void require_moment_order(int n, double p) {
  if (!(p > double(n))) {
    throw RegimeError("moment order p must exceed the sphere dimension n (p = " +
                      std::to_string(p) + ", n = " + std::to_string(n) + ")");
  }
}

void require_widths(const std::vector<int>& widths, std::size_t moment_count,
                    const char* who) {
  if (widths.size() < 3) {
    throw ConfigError(std::string(who) +
                      ": widths must list [n_0, ..., n_L] with L >= 2");
  }
  for (int w : widths) {
    if (w < 1) throw ConfigError(std::string(who) + ": widths must be >= 1");
  }
  const std::size_t L = widths.size() - 1;
  if (moment_count != L - 1) {
    throw ConfigError(std::string(who) + ": expected " + std::to_string(L - 1) +
                      " operator-norm moments (one per layer 1..L-1), got " +
                      std::to_string(moment_count));
  }
}

}  // namespace

double width_exponent(int n, double p, double iota, WidthExponentForm form) {
  require_moment_order(n, p);
  if (!(iota > 0.0)) throw ConfigError("width_exponent: iota > 0 required");
  const double a = 1.0 - double(n) / p;
  const double b = double(n) + iota;
  if (form == WidthExponentForm::statement) return a / (6.0 * a + 8.0 * b);
  return a / (8.0 * a + 6.0 * b);
}

double master_bound(double dF, double modF, double modH, const BoundParams& params) {
  if (!(params.eps > 0.0 && params.eps < 1.0 && params.delta > 0.0 && params.delta < 1.0)) {
    throw RegimeError("master_bound: eps and delta must lie in (0,1)");
  }
  if (params.d < 1 || params.n < 1) throw ConfigError("master_bound: n, d >= 1 required");
  if (!(params.iota > 0.0)) throw ConfigError("master_bound: iota > 0 required");
  if (dF < 0.0 || modF < 0.0 || modH < 0.0) {
    throw ConfigError("master_bound: distance and modulus inputs must be >= 0");
  }
  const double smoothing = std::pow(params.eps, -2.0 * (double(params.n) + params.iota));
  const double first = double(params.d) / (params.delta * params.delta) * smoothing * dF;
  return params.constant_c *
         (first + modF + modH + params.delta * std::sqrt(double(params.d)));
}

double sequential_width_bound(const std::vector<int>& widths,
                              const std::vector<double>& opnorm_moments,
                              double lip_sigma, int n, double p, double iota,
                              double constant_c, WidthExponentForm form) {
  require_widths(widths, opnorm_moments.size(), "sequential_width_bound");
  if (lip_sigma < 0.0) throw ConfigError("sequential_width_bound: lip_sigma >= 0 required");
  for (double m : opnorm_moments) {
    if (m < 0.0) throw ConfigError("sequential_width_bound: moments must be >= 0");
  }
  const double expo = width_exponent(n, p, iota, form);
  const std::size_t L = widths.size() - 1;
  double sum = 0.0;
  for (std::size_t l = 1; l <= L - 1; ++l) {
    const double n_l = double(widths[l]);
    const double n_next = double(widths[l + 1]);
    const double ratio = std::pow(n_next, 4.0) / n_l;
    if (!(ratio < 1.0)) {
      throw RegimeError("sequential-limit condition violated: need n_" +
                        std::to_string(l + 1) + "^4 < n_" + std::to_string(l) +
                        " (ratio = " + std::to_string(ratio) + ")");
    }
    double prod = 1.0;
    for (std::size_t j = l + 1; j <= L - 1; ++j) prod *= opnorm_moments[j - 1];
    sum += std::sqrt(n_next) * std::pow(ratio, expo) * std::log(1.0 / ratio) * prod;
  }
  return constant_c * std::pow(1.0 + lip_sigma, 3.0 * double(L - 1)) * sum;
}

double beta_coefficient(const std::vector<int>& widths,
                        const std::vector<double>& opnorm3_moments) {
  require_widths(widths, opnorm3_moments.size(), "beta_coefficient");
  for (double m : opnorm3_moments) {
    if (m < 0.0) throw ConfigError("beta_coefficient: moments must be >= 0");
  }
  const std::size_t L = widths.size() - 1;
  double sum = 0.0;
  for (std::size_t l = 1; l <= L - 1; ++l) {
    double prod = 1.0;
    for (std::size_t j = l + 1; j <= L - 1; ++j) {
      prod *= std::max(1.0, opnorm3_moments[j - 1]);
    }
    sum += std::pow(double(widths[l + 1]), 1.5) / std::sqrt(double(widths[l])) * prod;
  }
  return sum;
}

double smooth_metric_w1_bound(const std::vector<int>& widths,
                              const std::vector<double>& opnorm3_moments,
                              int n, double p, double iota, double constant_c,
                              WidthExponentForm form) {
  const double expo = width_exponent(n, p, iota, form);
  const double beta = beta_coefficient(widths, opnorm3_moments);
  const double n_L = double(widths.back());
  const double arg = n_L * beta * beta;
  if (!(arg < 1.0)) {
    throw RegimeError("bound regime violated: need n_L * beta^2 < 1 (got " +
                      std::to_string(arg) + ")");
  }
  return constant_c * std::sqrt(n_L) * std::pow(arg, expo) * std::sqrt(std::log(1.0 / arg));
}

double smooth_metric_layer_bound(double c_w, double B, double third_moment_sup,
                                 int n_out, int n_in) {
  if (c_w < 0.0 || B < 0.0 || third_moment_sup < 0.0 || n_out < 0) {
    throw ConfigError("smooth_metric_layer_bound: inputs must be >= 0");
  }
  if (n_in < 1) throw ConfigError("smooth_metric_layer_bound: n_in >= 1 required");
  return std::pow(c_w, 1.5) * std::pow(B, 0.75) * third_moment_sup *
         std::pow(double(n_out), 1.5) / std::sqrt(double(n_in));
}

double regularization_error_bound(double c, int d, int n, double p, double eps) {
  require_moment_order(n, p);
  if (c < 0.0 || d < 1) throw ConfigError("regularization_error_bound: c >= 0, d >= 1");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw RegimeError("regularization_error_bound: eps must lie in (0,1)");
  }
  const double expo = 0.5 * (1.0 - double(n) / p);
  return c * std::sqrt(double(d)) * std::pow(eps, expo) * std::sqrt(std::log(1.0 / eps));
}

EpsDelta optimal_eps_delta(int n, double p, double iota, double ratio) {
  require_moment_order(n, p);
  if (!(iota > 0.0)) throw ConfigError("optimal_eps_delta: iota > 0 required");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw RegimeError("optimal_eps_delta: width ratio must lie in (0,1)");
  }
  const double a = 1.0 - double(n) / p;
  const double b = double(n) + iota;
  EpsDelta out;
  out.eps = std::pow(ratio, 1.0 / (3.0 * a + 4.0 * b));
  out.delta = std::pow(out.eps, -(2.0 / 3.0) * b) * std::pow(ratio, 1.0 / 6.0);
  if (!(out.eps > 0.0 && out.eps < 1.0 && out.delta > 0.0 && out.delta < 1.0)) {
    throw RegimeError("optimal_eps_delta: balancing pair escaped (0,1); the "
                      "width ratio is too large for this regime");
  }
  return out;
}

namespace {

double chaining_increment_exponent(const ChainingParams& cp) {
  if (!(cp.alpha < 0.5 * cp.beta)) {
    throw RegimeError("chaining hypothesis violated: need alpha < beta/2 (alpha = " +
                      std::to_string(cp.alpha) + ", beta = " + std::to_string(cp.beta) + ")");
  }
  if (!(cp.gamma > 0.0)) throw ConfigError("chaining: gamma > 0 required");
  return cp.beta - 2.0 * cp.alpha;
}

}  // namespace

double chaining_tail_bound(const ChainingParams& cp, double theta, double lambda,
                           double constant_c) {
  const double expo = chaining_increment_exponent(cp);
  if (!(theta > 0.0 && lambda > 0.0)) {
    throw ConfigError("chaining_tail_bound: theta, lambda > 0 required");
  }
  const double value = constant_c * std::pow(theta, expo) / std::pow(lambda, cp.gamma);
  return std::min(1.0, value);
}

double chaining_moment_bound(const ChainingParams& cp, double theta, double k,
                             int d, double constant_c) {
  const double expo = chaining_increment_exponent(cp);
  if (!(theta > 0.0)) throw ConfigError("chaining_moment_bound: theta > 0 required");
  if (d < 1) throw ConfigError("chaining_moment_bound: d >= 1 required");
  if (!(k > 0.0 && k < cp.gamma)) {
    throw RegimeError("chaining hypothesis violated: need 0 < k < gamma (k = " +
                      std::to_string(k) + ", gamma = " + std::to_string(cp.gamma) + ")");
  }
  return constant_c * std::pow(double(d), 0.5 * k) * std::pow(theta, k * expo / cp.gamma);
}

}  // namespace steinfield
