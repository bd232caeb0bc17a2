#pragma once

#include <vector>

// =============================================================================
// Closed-form bound evaluators.
//
// Every explicit error-control expression in the library has an evaluator
// here: the master smoothed-metric bound, the sequential-width bound with
// its exponent, the beta width coefficient, the per-layer smooth-metric
// bound, the regularization error, the optimizing (eps, delta) pair, and
// the chaining tail/moment bounds. Absolute constants that theory leaves
// unspecified are exposed as parameters defaulting to 1, so outputs are
// meaningful up to that constant. Regime violations (log arguments,
// ratio windows, exponent hypotheses) are hard errors, never NaNs.
// =============================================================================

namespace steinfield {

// Shared parameter block: sphere dimension n, field coordinate count d,
// smoothness iota > 0, moment order p > n, smoothing scales eps and
// delta in (0,1), and the overall unspecified constant.
struct BoundParams {
  int n = 1;
  int d = 1;
  double iota = 1.0;
  double p = 1e9;        // stand-in for the p -> infinity limit
  double eps = 0.5;
  double delta = 0.5;
  double constant_c = 1.0;
};

// Modulus-of-continuity chaining inputs: covering exponent alpha,
// increment exponent beta, moment power gamma, their constants, and the
// diameter of the index space.
struct ChainingParams {
  double alpha = 1.0;
  double beta = 4.0;
  double gamma = 4.0;
  double c0 = 1.0;
  double c1 = 1.0;
  double diam = 3.14159265358979323846;
};

// The sequential-width exponent appears in two algebraically distinct
// forms (6/8 vs 8/6 coefficient placement) in different displays of the
// same development; `statement` is the primary form, `alternate` the
// other, kept selectable because neither is obviously the typo.
enum class WidthExponentForm { statement, alternate };

// (1 - n/p) / (6(1 - n/p) + 8(n + iota)) (statement form).
// Errors: p <= n.
double width_exponent(int n, double p, double iota,
                      WidthExponentForm form = WidthExponentForm::statement);

// C * ( d * delta^-2 * eps^{-2(n+iota)} * dF + modF + modH + delta*sqrt(d) ).
// dF is a smooth-metric distance, modF/modH are sup-norm moduli of the
// two fields under smoothing. Errors: eps or delta outside (0,1).
double master_bound(double dF, double modF, double modH, const BoundParams& params);

// c * (1 + lip_sigma)^{3(L-1)} *
//   sum_{l=1}^{L-1} n_{l+1}^{1/2} (n_{l+1}^4/n_l)^{expo} log(n_l/n_{l+1}^4)
//     * prod_{j=l+1}^{L-1} opnorm_moments[j-1].
// widths = [n_0, ..., n_L]; opnorm_moments[j-1] = E||W^(j)||_op for
// j = 1..L-1. Errors: a log argument <= 1 ("sequential-limit condition
// violated"), p <= n.
double sequential_width_bound(const std::vector<int>& widths,
                              const std::vector<double>& opnorm_moments,
                              double lip_sigma, int n, double p, double iota,
                              double constant_c = 1.0,
                              WidthExponentForm form = WidthExponentForm::statement);

// beta = sum_{l=1}^{L-1} n_{l+1}^{3/2}/sqrt(n_l)
//          * prod_{j=l+1}^{L-1} max(1, opnorm3_moments[j-1]).
// opnorm3_moments[j-1] = E||W^(j)||_op^3; the max with 1 is applied here.
double beta_coefficient(const std::vector<int>& widths,
                        const std::vector<double>& opnorm3_moments);

// c * sqrt(n_L) * (n_L beta^2)^{expo} * sqrt(log(1/(n_L beta^2))).
// Errors: n_L * beta^2 >= 1 ("bound regime violated"), p <= n.
double smooth_metric_w1_bound(const std::vector<int>& widths,
                              const std::vector<double>& opnorm3_moments,
                              int n, double p, double iota,
                              double constant_c = 1.0,
                              WidthExponentForm form = WidthExponentForm::statement);

// c_w^{3/2} * B^{3/4} * third_moment_sup * n_out^{3/2} / sqrt(n_in):
// one layer's contribution to the smooth-metric distance, with B the
// weight-law moment constant and third_moment_sup = E||sigma(H)||_inf^3.
double smooth_metric_layer_bound(double c_w, double B, double third_moment_sup,
                                 int n_out, int n_in);

// c * sqrt(d) * eps^{(1-n/p)/2} * sqrt(log(1/eps)).
// Errors: eps outside (0,1), p <= n.
double regularization_error_bound(double c, int d, int n, double p, double eps);

struct EpsDelta {
  double eps = 0.0;
  double delta = 0.0;
};

// The balancing choice eps = ratio^{1/(3(1-n/p) + 4(n+iota))},
// delta = eps^{-(2/3)(n+iota)} * ratio^{1/6}, where ratio is the driving
// width ratio n_{l+1}^4 / n_l. Errors: ratio outside (0,1), p <= n, or a
// result escaping (0,1).
EpsDelta optimal_eps_delta(int n, double p, double iota, double ratio);

// min(1, c * theta^{beta - 2 alpha} / lambda^gamma): tail probability of
// the modulus of continuity at scale theta and level lambda.
// Errors: alpha >= beta/2 ("chaining hypothesis violated"), theta or
// lambda <= 0.
double chaining_tail_bound(const ChainingParams& cp, double theta, double lambda,
                           double constant_c = 1.0);

// c * d^{k/2} * theta^{k(beta - 2 alpha)/gamma}: k-th moment bound of the
// modulus of continuity. Errors: alpha >= beta/2 or k outside (0, gamma).
double chaining_moment_bound(const ChainingParams& cp, double theta, double k,
                             int d, double constant_c = 1.0);

}  // namespace steinfield
