#include "steinfield/stein.hpp"

#include <cmath>
#include <string>

#include "steinfield/errors.hpp"

namespace steinfield {

BatchFunctional lift_pointwise(std::function<double(const Eigen::VectorXd&)> f) {
  return [f = std::move(f)](const Eigen::MatrixXd& Y) {
    Eigen::VectorXd out(Y.cols());
    for (Eigen::Index c = 0; c < Y.cols(); ++c) out[c] = f(Y.col(c));
    return out;
  };
}

SteinSolver::SteinSolver(SteinProblem problem) : problem_(std::move(problem)) {
  if (!problem_.zeta) throw ConfigError("SteinSolver: missing zeta");
  if (problem_.t_nodes < 4) throw ConfigError("SteinSolver: t_nodes >= 4 required");
  const Eigen::Index m = problem_.sigma.rows();
  if (m < 1 || problem_.sigma.cols() != m) {
    throw ConfigError("SteinSolver: sigma must be square and nonempty");
  }
  chol_ = cholesky_with_jitter(problem_.sigma).L;

  if (problem_.mc > 0) {
    mc_path_ = true;
    const int N = problem_.mc + (problem_.mc % 2);  // antithetic pairing
    Rng rng(problem_.seed);
    Eigen::MatrixXd Z(m, N);
    for (int p = 0; p < N / 2; ++p) {
      for (Eigen::Index i = 0; i < m; ++i) Z(i, 2 * p) = rng.normal();
      Z.col(2 * p + 1) = -Z.col(2 * p);
    }
    nodes_ = chol_ * Z;
    wts_ = Eigen::VectorXd::Constant(N, 1.0 / N);
  } else {
    if (m > 4) {
      throw ConfigError(
          "SteinSolver: the tensor quadrature path supports dim <= 4; set mc "
          "for higher dimensions");
    }
    if (problem_.gh_nodes < 2) throw ConfigError("SteinSolver: gh_nodes >= 2 required");
    const QuadratureRule gh = gauss_hermite_prob(problem_.gh_nodes);
    Eigen::Index N = 1;
    for (Eigen::Index i = 0; i < m; ++i) N *= problem_.gh_nodes;
    Eigen::MatrixXd Z(m, N);
    wts_.resize(N);
    for (Eigen::Index idx = 0; idx < N; ++idx) {
      Eigen::Index rem = idx;
      double w = 1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const int pos = static_cast<int>(rem % problem_.gh_nodes);
        rem /= problem_.gh_nodes;
        Z(i, idx) = gh.nodes[pos];
        w *= gh.weights[pos];
      }
      wts_[idx] = w;
    }
    nodes_ = chol_ * Z;
  }

  t_rule_hi_ = gauss_legendre(problem_.t_nodes, 0.0, 1.0);
  t_rule_lo_ = gauss_legendre(std::max(problem_.t_nodes / 2, 2), 0.0, 1.0);

  // E[zeta(G)] with the same nodes/stream as every later expectation.
  const Eigen::VectorXd vals = problem_.zeta(nodes_);
  ezg_ = wts_.dot(vals);
  if (mc_path_) {
    const Eigen::ArrayXd centered = vals.array() - ezg_;
    ezg_std_err_ = std::sqrt((centered * centered).mean() / double(vals.size()));
  }
}

double SteinSolver::weighted_zeta(double u, const Eigen::VectorXd& f,
                                  Eigen::MatrixXd& buf) const {
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  buf = s * nodes_;
  buf.colwise() += u * f;
  return wts_.dot(problem_.zeta(buf));
}

MonteCarloValue SteinSolver::semigroup_value(const Eigen::VectorXd& f, double t) const {
  if (!(t >= 0.0)) throw ConfigError("semigroup_value: t >= 0 required");
  if (f.size() != dim()) throw ConfigError("semigroup_value: f has wrong dimension");
  const double u = std::exp(-t);
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  Eigen::MatrixXd Y = s * nodes_;
  Y.colwise() += u * f;
  const Eigen::VectorXd vals = problem_.zeta(Y);
  const double mean = wts_.dot(vals);
  double std_err = 0.0;
  if (mc_path_) {
    const Eigen::ArrayXd centered = vals.array() - mean;
    std_err = std::sqrt((centered * centered).mean() / double(vals.size()));
  }
  return MonteCarloValue{mean, std_err};
}

double SteinSolver::zeta_at(const Eigen::VectorXd& f) const {
  Eigen::MatrixXd Y(f.size(), 1);
  Y.col(0) = f;
  return problem_.zeta(Y)[0];
}

double SteinSolver::eta_with_rule(const Eigen::VectorXd& f, const QuadratureRule& rule,
                                  Eigen::MatrixXd& buf) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = rule.nodes[i];
    acc += rule.weights[i] * (weighted_zeta(u, f, buf) - ezg_) / u;
  }
  return -acc;
}

double SteinSolver::solution(const Eigen::VectorXd& f) const {
  if (f.size() != dim()) throw ConfigError("stein solution: f has wrong dimension");
  Eigen::MatrixXd buf;
  const double hi = eta_with_rule(f, t_rule_hi_, buf);
  const double lo = eta_with_rule(f, t_rule_lo_, buf);
  if (std::fabs(hi - lo) > 5e-3 * (1.0 + std::fabs(hi))) {
    throw NumericalError(
        "stein solution: time integral failed the convergence heuristic "
        "(node halving moved the value by " + std::to_string(std::fabs(hi - lo)) + ")");
  }
  return hi;
}

double SteinSolver::fd_step(const Eigen::VectorXd& f) const {
  return 1e-4 * (1.0 + f.norm());
}

Eigen::VectorXd SteinSolver::solution_gradient(const Eigen::VectorXd& f) const {
  const double h = fd_step(f);
  Eigen::VectorXd g(f.size());
  Eigen::VectorXd e = f;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    e[i] = f[i] + h;
    const double up = solution(e);
    e[i] = f[i] - h;
    const double dn = solution(e);
    e[i] = f[i];
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd SteinSolver::solution_hessian(const Eigen::VectorXd& f) const {
  const Eigen::Index m = f.size();
  const double h = fd_step(f);
  const double center = solution(f);
  Eigen::MatrixXd H(m, m);
  Eigen::VectorXd e = f;
  std::vector<double> up(m), dn(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    e[i] = f[i] + h;
    up[i] = solution(e);
    e[i] = f[i] - h;
    dn[i] = solution(e);
    e[i] = f[i];
    H(i, i) = (up[i] - 2.0 * center + dn[i]) / (h * h);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      e[i] = f[i] + h;
      e[j] = f[j] + h;
      const double pp = solution(e);
      e[j] = f[j] - h;
      const double pm = solution(e);
      e[i] = f[i] - h;
      const double mm = solution(e);
      e[j] = f[j] + h;
      const double mp = solution(e);
      e[i] = f[i];
      e[j] = f[j];
      H(i, j) = (pp - pm - mp + mm) / (4.0 * h * h);
      H(j, i) = H(i, j);
    }
  }
  return H;
}

double SteinSolver::residual(const Eigen::VectorXd& f) const {
  const Eigen::VectorXd grad = solution_gradient(f);
  const Eigen::MatrixXd H = solution_hessian(f);
  const double trace_term = (problem_.sigma.array() * H.array()).sum();
  return trace_term - f.dot(grad) - zeta_at(f) + ezg_;
}

Eigen::VectorXd SteinSolver::gaussian_point(Rng& rng) const {
  Eigen::VectorXd z(dim());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return chol_ * z;
}

double cube_bilinear_norm(const Eigen::MatrixXd& H) {
  const Eigen::Index m = H.rows();
  if (m != H.cols() || m < 1) throw ConfigError("cube_bilinear_norm: square matrix required");
  if (m > 16) throw ConfigError("cube_bilinear_norm: enumeration limited to dim <= 16");
  double best = 0.0;
  // |g^T H h| is invariant under (g, h) -> (-g, -h); fix g_1 = +1.
  for (long long gs = 0; gs < (1LL << (m - 1)); ++gs) {
    Eigen::VectorXd g(m);
    g[0] = 1.0;
    for (Eigen::Index i = 1; i < m; ++i) g[i] = (gs >> (i - 1)) & 1 ? 1.0 : -1.0;
    const Eigen::VectorXd Hg = H.transpose() * g;
    // Optimal h for fixed g is sign(H^T g).
    double v = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) v += std::fabs(Hg[i]);
    best = std::max(best, v);
  }
  return best;
}

SteinCaseReport derivative_bound_check(const SteinSolver& solver, int k,
                                       int trial_count, double sup_dk_zeta,
                                       Rng& rng, const std::string& case_name) {
  if (k != 1 && k != 2) throw ConfigError("derivative_bound_check: k must be 1 or 2");
  if (trial_count < 1) throw ConfigError("derivative_bound_check: trial_count >= 1");
  if (!(sup_dk_zeta > 0.0)) throw ConfigError("derivative_bound_check: sup norm must be > 0");
  double estimate = 0.0;
  for (int t = 0; t < trial_count; ++t) {
    const Eigen::VectorXd f = solver.gaussian_point(rng);
    if (k == 1) {
      estimate = std::max(estimate, solver.solution_gradient(f).lpNorm<1>());
    } else {
      estimate = std::max(estimate, cube_bilinear_norm(solver.solution_hessian(f)));
    }
  }
  SteinCaseReport r;
  r.case_name = case_name;
  r.bound = sup_dk_zeta / double(k);
  r.estimate = estimate;
  r.ratio = estimate / sup_dk_zeta;
  r.pass = estimate <= r.bound * (1.0 + 5e-2);
  return r;
}

SteinCaseReport hessian_difference_check(const SteinSolver& solver, int trial_count,
                                         Rng& rng, const std::string& case_name) {
  if (trial_count < 1) throw ConfigError("hessian_difference_check: trial_count >= 1");
  double estimate = 0.0;  // max per-unit-distance Hessian variation
  for (int t = 0; t < trial_count; ++t) {
    const Eigen::VectorXd f = solver.gaussian_point(rng);
    const Eigen::VectorXd h = solver.gaussian_point(rng);
    const double dist = (f - h).lpNorm<Eigen::Infinity>();
    if (dist < 1e-8) continue;
    const double diff = cube_bilinear_norm(solver.solution_hessian(f) -
                                           solver.solution_hessian(h));
    estimate = std::max(estimate, diff / dist);
  }
  SteinCaseReport r;
  r.case_name = case_name;
  r.bound = 1.0 / 3.0;
  r.estimate = estimate;
  r.ratio = estimate / r.bound;
  r.pass = estimate <= r.bound * (1.0 + 5e-2);
  return r;
}

namespace {

Eigen::MatrixXd suite_sigma(unsigned long long master_seed, int m, int salt) {
  Rng rng(derive_seed(master_seed, 101, m, salt));
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) A(i, j) = rng.normal();
  }
  return 0.5 * Eigen::MatrixXd::Identity(m, m) + 0.5 / double(m) * (A * A.transpose());
}

Eigen::VectorXd suite_direction(unsigned long long master_seed, int m, int salt,
                                double l1_target) {
  Rng rng(derive_seed(master_seed, 202, m, salt));
  Eigen::VectorXd a(m);
  for (int i = 0; i < m; ++i) a[i] = rng.normal();
  return a * (l1_target / a.lpNorm<1>());
}

Eigen::MatrixXd suite_psd(unsigned long long master_seed, int m, int salt) {
  Rng rng(derive_seed(master_seed, 303, m, salt));
  Eigen::MatrixXd B(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) B(i, j) = rng.normal();
  }
  return (B * B.transpose()) / double(m);
}

BatchFunctional linear_functional(Eigen::VectorXd a) {
  return [a = std::move(a)](const Eigen::MatrixXd& Y) -> Eigen::VectorXd {
    return Y.transpose() * a;
  };
}

BatchFunctional quadratic_functional(Eigen::MatrixXd A) {
  return [A = std::move(A)](const Eigen::MatrixXd& Y) -> Eigen::VectorXd {
    return ((A * Y).cwiseProduct(Y)).colwise().sum().transpose();
  };
}

BatchFunctional sine_functional(Eigen::VectorXd a) {
  return [a = std::move(a)](const Eigen::MatrixXd& Y) -> Eigen::VectorXd {
    return (Y.transpose() * a).array().sin().matrix();
  };
}

BatchFunctional bump_functional(double s, double amp = 1.0) {
  return [s, amp](const Eigen::MatrixXd& Y) -> Eigen::VectorXd {
    const Eigen::VectorXd sq = Y.colwise().squaredNorm().transpose();
    return amp * (-sq.array() / (2.0 * s * s)).exp().matrix();
  };
}

// sup |d^3/dx^3 exp(-x^2 / (2 s^2))| = bump_d3_sup() / s^3 (one dimension).
double bump_d3_sup() {
  const double u2 = 3.0 - std::sqrt(6.0);
  return std::sqrt(u2) * std::sqrt(6.0) * std::exp(-0.5 * u2);
}

SteinCaseReport residual_case(const std::string& name, const SteinSolver& solver,
                              const Eigen::VectorXd& f, double tolerance) {
  SteinCaseReport r;
  r.case_name = name;
  r.bound = tolerance;
  r.estimate = std::fabs(solver.residual(f));
  r.ratio = r.estimate / tolerance;
  r.pass = r.estimate <= tolerance;
  return r;
}

}  // namespace

std::vector<SteinCaseReport> run_stein_suite(unsigned long long master_seed) {
  std::vector<SteinCaseReport> out;
  const int dims[] = {1, 2, 4};

  // --- residual identity: linear and quadratic (analytic eta, tight) ---
  for (int m : dims) {
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, m, 1);
    p.zeta = linear_functional(suite_direction(master_seed, m, 1, 1.5));
    p.gh_nodes = 8;
    p.seed = derive_seed(master_seed, 1, m, 0);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 2, m, 0));
    out.push_back(residual_case("residual_linear_dim" + std::to_string(m), solver,
                                solver.gaussian_point(rng), 1e-6));
  }
  for (int m : dims) {
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, m, 2);
    p.zeta = quadratic_functional(suite_psd(master_seed, m, 2));
    p.gh_nodes = 8;
    p.seed = derive_seed(master_seed, 1, m, 1);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 2, m, 1));
    out.push_back(residual_case("residual_quadratic_dim" + std::to_string(m), solver,
                                solver.gaussian_point(rng), 1e-4));
  }

  // --- residual identity: smooth bump, quadrature (dim 1) and Monte
  // Carlo (dim 2, the only stochastic case in the suite) ---
  {
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, 1, 3);
    p.zeta = bump_functional(0.8);
    p.gh_nodes = 48;
    p.t_nodes = 128;
    p.seed = derive_seed(master_seed, 1, 1, 2);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 2, 1, 2));
    out.push_back(residual_case("residual_bump_dim1", solver,
                                solver.gaussian_point(rng), 1e-2));
  }
  {
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, 2, 3);
    p.zeta = bump_functional(1.0);
    p.t_nodes = 200;
    p.mc = 1000000;
    p.seed = derive_seed(master_seed, 1, 2, 2);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 2, 2, 2));
    out.push_back(residual_case("residual_bump_dim2_mc", solver,
                                solver.gaussian_point(rng), 1e-2));
  }

  // --- gradient bound: ||D eta|| <= sup ||D zeta|| ---
  for (int m : dims) {
    const Eigen::VectorXd a = suite_direction(master_seed, m, 4, 1.5);
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, m, 4);
    p.zeta = linear_functional(a);
    p.gh_nodes = 8;
    p.seed = derive_seed(master_seed, 1, m, 3);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 3, m, 0));
    out.push_back(derivative_bound_check(solver, 1, 8, a.lpNorm<1>(), rng,
                                         "gradient_bound_linear_dim" + std::to_string(m)));
  }
  {
    const Eigen::VectorXd a = suite_direction(master_seed, 2, 5, 1.0);
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, 2, 5);
    p.zeta = sine_functional(a);
    p.gh_nodes = 24;
    p.seed = derive_seed(master_seed, 1, 2, 4);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 3, 2, 1));
    out.push_back(derivative_bound_check(solver, 1, 8, 1.0, rng, "gradient_bound_sine_dim2"));
  }
  {
    const double s = 0.8;
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, 1, 6);
    p.zeta = bump_functional(s);
    p.gh_nodes = 48;
    p.t_nodes = 128;
    p.seed = derive_seed(master_seed, 1, 1, 5);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 3, 1, 2));
    out.push_back(derivative_bound_check(solver, 1, 8, std::sqrt(1.0 / std::exp(1.0)) / s,
                                         rng, "gradient_bound_bump_dim1"));
  }

  // --- Hessian bound: ||D^2 eta|| <= (1/2) sup ||D^2 zeta|| ---
  for (int m : dims) {
    const Eigen::MatrixXd A = suite_psd(master_seed, m, 7);
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, m, 7);
    p.zeta = quadratic_functional(A);
    p.gh_nodes = 8;
    p.seed = derive_seed(master_seed, 1, m, 6);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 4, m, 0));
    out.push_back(derivative_bound_check(solver, 2, 8, cube_bilinear_norm(2.0 * A), rng,
                                         "hessian_bound_quadratic_dim" + std::to_string(m)));
  }
  {
    const Eigen::VectorXd a = suite_direction(master_seed, 2, 8, 1.0);
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, 2, 8);
    p.zeta = sine_functional(a);
    p.gh_nodes = 24;
    p.seed = derive_seed(master_seed, 1, 2, 7);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 4, 2, 1));
    // sup ||D^2 sin(a.f)|| over the cube pair is ||a||_1^2 = 1.
    out.push_back(derivative_bound_check(solver, 2, 8, 1.0, rng, "hessian_bound_sine_dim2"));
  }
  {
    const double s = 0.8;
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, 1, 9);
    p.zeta = bump_functional(s);
    p.gh_nodes = 48;
    p.t_nodes = 128;
    p.seed = derive_seed(master_seed, 1, 1, 8);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 4, 1, 2));
    out.push_back(derivative_bound_check(solver, 2, 8, 1.0 / (s * s), rng,
                                         "hessian_bound_bump_dim1"));
  }

  // --- Hessian difference: per unit sup-distance, coefficient 1/3 ---
  {
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, 2, 10);
    p.zeta = quadratic_functional(suite_psd(master_seed, 2, 10));
    p.gh_nodes = 8;
    p.seed = derive_seed(master_seed, 1, 2, 9);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 5, 2, 0));
    out.push_back(hessian_difference_check(solver, 6, rng,
                                           "hessian_difference_quadratic_dim2"));
  }
  {
    // Amplitude chosen so sup ||D^3 zeta|| = 1, the hypothesis under
    // which the 1/3 difference coefficient applies.
    const double s = 0.8;
    SteinProblem p;
    p.sigma = suite_sigma(master_seed, 1, 11);
    p.zeta = bump_functional(s, s * s * s / bump_d3_sup());
    p.gh_nodes = 48;
    p.t_nodes = 128;
    p.seed = derive_seed(master_seed, 1, 1, 10);
    SteinSolver solver(std::move(p));
    Rng rng(derive_seed(master_seed, 5, 1, 1));
    out.push_back(hessian_difference_check(solver, 6, rng, "hessian_difference_bump_dim1"));
  }

  return out;
}

}  // namespace steinfield
