#include "steinfield/nngp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

#include "steinfield/errors.hpp"
#include "steinfield/quadrature.hpp"

namespace steinfield {

namespace {
constexpr double kPi = 3.14159265358979323846;

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }
double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double draw_weight(Rng& rng, const WeightLawSpec& law, double sd) {
  switch (law.law) {
    case WeightLaw::gaussian:
      return sd * rng.normal();
    case WeightLaw::rademacher:
      return rng.uniform() < 0.5 ? -sd : sd;
    case WeightLaw::uniform:
      return sd * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
    case WeightLaw::scaled_student_t:
      return sd * std::sqrt((law.df - 2.0) / law.df) * rng.student_t(law.df);
  }
  throw ConfigError("draw_weight: unknown law");
}

Eigen::MatrixXd grid_matrix(const SphereGrid& g) {
  Eigen::MatrixXd X(g.size(), g.dim_n + 1);
  for (std::size_t i = 0; i < g.size(); ++i) X.row(i) = g.points[i].coords;
  return X;
}

Eigen::MatrixXd apply_activation(const NetworkSpec& spec, const Eigen::MatrixXd& H) {
  switch (spec.activation) {
    case Activation::relu:
      return H.cwiseMax(0.0);
    case Activation::tanh:
      return H.array().tanh().matrix();
    case Activation::identity:
      return H;
    case Activation::custom_lipschitz:
      return H.unaryExpr(spec.custom_sigma);
  }
  throw ConfigError("apply_activation: unknown activation");
}

// Forward pass up to (and including) layer `upto`, given pre-drawn input
// matrix X. upto = L gives the output field.
Eigen::MatrixXd propagate(const NetworkSpec& spec, const Eigen::MatrixXd& X,
                          Rng& rng, int upto) {
  Eigen::MatrixXd H = X;
  for (int l = 0; l < upto; ++l) {
    const int nin = spec.widths[l];
    const int nout = spec.widths[l + 1];
    const double sd_w = std::sqrt(spec.c_w[l] / double(nin));
    const double sd_b = std::sqrt(spec.c_b[l]);
    Eigen::MatrixXd W(nout, nin);
    for (int i = 0; i < nout; ++i) {
      for (int j = 0; j < nin; ++j) W(i, j) = draw_weight(rng, spec.weight_laws[l], sd_w);
    }
    Eigen::VectorXd b(nout);
    for (int i = 0; i < nout; ++i) b[i] = sd_b * rng.normal();
    const Eigen::MatrixXd A = (l == 0) ? H : apply_activation(spec, H);
    H = (A * W.transpose()).rowwise() + b.transpose();
  }
  return H;
}
}  // namespace

std::string WeightLawSpec::name() const {
  switch (law) {
    case WeightLaw::gaussian:
      return "gaussian";
    case WeightLaw::rademacher:
      return "rademacher";
    case WeightLaw::uniform:
      return "uniform";
    case WeightLaw::scaled_student_t: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "scaled-student-t(%g)", df);
      return buf;
    }
  }
  return "unknown";
}

WeightLawSpec WeightLawSpec::parse(const std::string& text) {
  WeightLawSpec s;
  if (text == "gaussian") {
    s.law = WeightLaw::gaussian;
  } else if (text == "rademacher") {
    s.law = WeightLaw::rademacher;
  } else if (text == "uniform") {
    s.law = WeightLaw::uniform;
  } else if (text.rfind("scaled-student-t(", 0) == 0 && text.back() == ')') {
    s.law = WeightLaw::scaled_student_t;
    const std::string inner = text.substr(17, text.size() - 18);
    char* end = nullptr;
    s.df = std::strtod(inner.c_str(), &end);
    if (end == inner.c_str() || *end != '\0' || !(s.df > 2.0)) {
      throw ConfigError("weight law: scaled-student-t needs df > 2, got '" + inner + "'");
    }
  } else {
    throw ConfigError(
        "weight law '" + text +
        "' not recognized (gaussian | rademacher | uniform | scaled-student-t(df))");
  }
  return s;
}

Activation parse_activation(const std::string& text) {
  if (text == "relu") return Activation::relu;
  if (text == "tanh") return Activation::tanh;
  if (text == "identity") return Activation::identity;
  if (text == "custom-lipschitz") return Activation::custom_lipschitz;
  throw ConfigError("activation '" + text +
                    "' not recognized (relu | tanh | identity | custom-lipschitz)");
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::identity:
      return "identity";
    case Activation::custom_lipschitz:
      return "custom-lipschitz";
  }
  return "unknown";
}

void NetworkSpec::validate() const {
  if (widths.size() < 2) throw ConfigError("NetworkSpec: need widths n_0..n_L with L >= 1");
  for (int w : widths) {
    if (w < 1) throw ConfigError("NetworkSpec: all widths must be >= 1");
  }
  const std::size_t L_sz = widths.size() - 1;
  if (c_w.size() != L_sz || c_b.size() != L_sz || weight_laws.size() != L_sz) {
    throw ConfigError("NetworkSpec: c_w, c_b, weight_laws must have one entry per layer");
  }
  for (double v : c_w) {
    if (v < 0.0) throw ConfigError("NetworkSpec: c_w >= 0 required");
  }
  for (double v : c_b) {
    if (v < 0.0) throw ConfigError("NetworkSpec: c_b >= 0 required");
  }
  for (const WeightLawSpec& l : weight_laws) {
    if (l.law == WeightLaw::scaled_student_t && !(l.df > 2.0)) {
      throw ConfigError("NetworkSpec: scaled-student-t needs df > 2");
    }
  }
  if (activation == Activation::custom_lipschitz) {
    if (!custom_sigma) throw ConfigError("NetworkSpec: custom activation callable missing");
    if (!(lip_constant > 0.0)) throw ConfigError("NetworkSpec: Lipschitz constant > 0 required");
  }
}

std::string NetworkSpec::to_json() const {
  nlohmann::json j;
  j["widths"] = widths;
  j["c_w"] = c_w;
  j["c_b"] = c_b;
  std::vector<std::string> laws;
  for (const auto& l : weight_laws) laws.push_back(l.name());
  const bool uniform_laws =
      std::all_of(laws.begin(), laws.end(), [&](const std::string& s) { return s == laws[0]; });
  if (uniform_laws) {
    j["weight_law"] = laws[0];
  } else {
    j["weight_law"] = laws;
  }
  j["activation"] = activation_name(activation);
  j["seed"] = seed;
  return j.dump(2);
}

NetworkSpec NetworkSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("network spec JSON: ") + e.what());
  }
  NetworkSpec s;
  try {
    s.widths = j.at("widths").get<std::vector<int>>();
    const std::size_t L_sz = s.widths.size() < 2 ? 1 : s.widths.size() - 1;
    auto expand = [&](const nlohmann::json& v) {
      return v.is_array() ? v.get<std::vector<double>>()
                          : std::vector<double>(L_sz, v.get<double>());
    };
    s.c_w = expand(j.at("c_w"));
    s.c_b = expand(j.at("c_b"));
    const nlohmann::json& wl = j.at("weight_law");
    if (wl.is_array()) {
      for (const auto& v : wl) s.weight_laws.push_back(WeightLawSpec::parse(v.get<std::string>()));
    } else {
      s.weight_laws.assign(L_sz, WeightLawSpec::parse(wl.get<std::string>()));
    }
    s.activation = parse_activation(j.at("activation").get<std::string>());
    if (j.contains("seed")) s.seed = j["seed"].get<unsigned long long>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("network spec JSON: ") + e.what());
  }
  s.validate();
  return s;
}

FieldSample sample_network_field(const NetworkSpec& spec,
                                 std::shared_ptr<const SphereGrid> grid, Rng& rng) {
  spec.validate();
  if (!grid) throw ConfigError("sample_network_field: missing grid");
  if (grid->dim_n + 1 != spec.widths[0]) {
    throw ConfigError("sample_network_field: grid ambient dimension " +
                      std::to_string(grid->dim_n + 1) + " != n_0 = " +
                      std::to_string(spec.widths[0]));
  }
  FieldSample f;
  f.grid = grid;
  f.values = propagate(spec, grid_matrix(*grid), rng, spec.L());
  return f;
}

double relu_bivariate_closed_form(double v1, double v2, double rho) {
  if (v1 <= 0.0 || v2 <= 0.0) return 0.0;
  const double r = std::clamp(rho, -1.0 + 1e-12, 1.0 - 1e-12);
  const double phi = std::acos(r);
  return std::sqrt(v1 * v2) / (2.0 * kPi) * (std::sin(phi) + (kPi - phi) * std::cos(phi));
}

double relu_bivariate_quadrature(double v1, double v2, double rho, int gl_nodes) {
  if (v1 <= 0.0 || v2 <= 0.0) return 0.0;
  const double r = std::clamp(rho, -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  // Condition on Z1: relu(sqrt(v1) z) vanishes for z <= 0, and the inner
  // expectation E[relu(mu + sd Z)] has the closed form mu Phi(mu/sd) +
  // sd phi(mu/sd); the outer integrand is smooth on (0, inf).
  const QuadratureRule gl = gauss_legendre(std::max(gl_nodes, 32), 0.0, 12.0);
  const double sd = std::sqrt(v2) * s;
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double z = gl.nodes[i];
    const double mu = std::sqrt(v2) * r * z;
    const double inner = sd > 0.0 ? mu * norm_cdf(mu / sd) + sd * norm_pdf(mu / sd)
                                  : std::max(mu, 0.0);
    acc += gl.weights[i] * norm_pdf(z) * std::sqrt(v1) * z * inner;
  }
  return acc;
}

double bivariate_expectation_quadrature(const std::function<double(double)>& sigma,
                                        double v1, double v2, double rho,
                                        int gh_nodes) {
  if (!sigma) throw ConfigError("bivariate_expectation_quadrature: missing sigma");
  if (gh_nodes < 2) throw ConfigError("bivariate_expectation_quadrature: gh_nodes >= 2");
  const double r = std::clamp(rho, -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  const double s1 = std::sqrt(std::max(0.0, v1));
  const double s2 = std::sqrt(std::max(0.0, v2));
  const QuadratureRule gh = gauss_hermite_prob(gh_nodes);
  double acc = 0.0;
  for (int i = 0; i < gh_nodes; ++i) {
    const double u = sigma(s1 * gh.nodes[i]);
    if (!std::isfinite(u)) {
      throw NumericalError("bivariate_expectation_quadrature: sigma returned non-finite value");
    }
    double row = 0.0;
    for (int j = 0; j < gh_nodes; ++j) {
      const double v = sigma(s2 * (r * gh.nodes[i] + s * gh.nodes[j]));
      if (!std::isfinite(v)) {
        throw NumericalError("bivariate_expectation_quadrature: sigma returned non-finite value");
      }
      row += gh.weights[j] * v;
    }
    acc += gh.weights[i] * u * row;
  }
  return acc;
}

double bivariate_expectation(Activation act, const std::function<double(double)>& sigma,
                             double v1, double v2, double rho, int gh_nodes) {
  switch (act) {
    case Activation::relu:
      return relu_bivariate_closed_form(v1, v2, rho);
    case Activation::identity:
      return rho * std::sqrt(std::max(0.0, v1) * std::max(0.0, v2));
    case Activation::tanh:
      return bivariate_expectation_quadrature([](double u) { return std::tanh(u); }, v1,
                                              v2, rho, gh_nodes);
    case Activation::custom_lipschitz:
      return bivariate_expectation_quadrature(sigma, v1, v2, rho, gh_nodes);
  }
  throw ConfigError("bivariate_expectation: unknown activation");
}

double limiting_covariance(const NetworkSpec& spec, const SpherePoint& x,
                           const SpherePoint& y, int gh_nodes) {
  spec.validate();
  if (x.dim_n() + 1 != spec.widths[0] || y.dim_n() + 1 != spec.widths[0]) {
    throw ConfigError("limiting_covariance: point dimension != n_0");
  }
  const double n0 = double(spec.widths[0]);
  double v1 = spec.c_w[0] / n0 * x.coords.dot(x.coords) + spec.c_b[0];
  double v2 = spec.c_w[0] / n0 * y.coords.dot(y.coords) + spec.c_b[0];
  double c12 = spec.c_w[0] / n0 * x.coords.dot(y.coords) + spec.c_b[0];
  for (int l = 1; l < spec.L(); ++l) {
    double e11, e22, e12;
    if (v1 <= 0.0 || v2 <= 0.0) {
      // Degenerate marginal: the input is almost surely 0, and every
      // supported activation fixes 0, so the expectation terms vanish.
      e11 = v1 <= 0.0 ? 0.0 : bivariate_expectation(spec.activation, spec.custom_sigma,
                                                    v1, v1, 1.0, gh_nodes);
      e22 = v2 <= 0.0 ? 0.0 : bivariate_expectation(spec.activation, spec.custom_sigma,
                                                    v2, v2, 1.0, gh_nodes);
      e12 = 0.0;
      if (spec.activation == Activation::custom_lipschitz &&
          spec.custom_sigma(0.0) != 0.0) {
        throw ConfigError("limiting_covariance: degenerate variance with sigma(0) != 0");
      }
    } else {
      const double rho = std::clamp(c12 / std::sqrt(v1 * v2), -1.0, 1.0);
      e11 = bivariate_expectation(spec.activation, spec.custom_sigma, v1, v1, 1.0, gh_nodes);
      e22 = bivariate_expectation(spec.activation, spec.custom_sigma, v2, v2, 1.0, gh_nodes);
      e12 = bivariate_expectation(spec.activation, spec.custom_sigma, v1, v2, rho, gh_nodes);
    }
    v1 = spec.c_w[l] * e11 + spec.c_b[l];
    v2 = spec.c_w[l] * e22 + spec.c_b[l];
    c12 = spec.c_w[l] * e12 + spec.c_b[l];
  }
  return c12;
}

KernelMatrix limiting_kernel_matrix(const NetworkSpec& spec,
                                    std::shared_ptr<const SphereGrid> grid,
                                    int gh_nodes) {
  return kernel_matrix_from(std::move(grid),
                            [&](const SpherePoint& x, const SpherePoint& y) {
                              return limiting_covariance(spec, x, y, gh_nodes);
                            });
}

std::vector<FieldSample> sample_limit_field(const NetworkSpec& spec,
                                            std::shared_ptr<const SphereGrid> grid,
                                            Rng& rng, int count, bool antithetic) {
  spec.validate();
  const KernelMatrix K = limiting_kernel_matrix(spec, std::move(grid));
  return cholesky_sample(K, spec.widths.back(), rng, count, antithetic);
}

CovarianceEstimate empirical_network_covariance(const NetworkSpec& spec,
                                                std::shared_ptr<const SphereGrid> grid,
                                                Rng& rng, int draws) {
  spec.validate();
  if (!grid) throw ConfigError("empirical_network_covariance: missing grid");
  if (draws < 2) throw ConfigError("empirical_network_covariance: draws >= 2 required");
  if (grid->dim_n + 1 != spec.widths[0]) {
    throw ConfigError("empirical_network_covariance: grid ambient dimension != n_0");
  }
  const Eigen::MatrixXd X = grid_matrix(*grid);
  const int L = spec.L();
  const int n_top_in = spec.widths[L - 1];
  const double cw = spec.c_w[L - 1];
  const double cb = spec.c_b[L - 1];
  const Eigen::Index m = X.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(m, m);
  for (int r = 0; r < draws; ++r) {
    const Eigen::MatrixXd H = propagate(spec, X, rng, L - 1);
    const Eigen::MatrixXd A = (L - 1 == 0) ? H : apply_activation(spec, H);
    // Conditional covariance of the layer-L field given everything below:
    // exact in the top-layer weight randomness, so its only noise is the
    // hidden-feature sampling — which shrinks with width.
    const Eigen::MatrixXd khat =
        (cw / double(n_top_in)) * (A * A.transpose()).array() + cb;
    sum += khat;
    sum_sq += khat.cwiseProduct(khat);
  }
  CovarianceEstimate est;
  est.mean = sum / double(draws);
  const Eigen::MatrixXd var =
      ((sum_sq - draws * est.mean.cwiseProduct(est.mean)) / double(draws - 1))
          .cwiseMax(0.0);
  est.std_err = (var / double(draws)).cwiseSqrt();
  return est;
}

double weight_moment_constant(const WeightLawSpec& law, int p) {
  if (p < 1) throw ConfigError("weight_moment_constant: p >= 1 required");
  double m2p;  // standardized 2p-th moment E[(W/sd)^{2p}]
  switch (law.law) {
    case WeightLaw::gaussian: {
      m2p = 1.0;
      for (int i = 1; i <= p; ++i) m2p *= 2.0 * i - 1.0;
      break;
    }
    case WeightLaw::rademacher:
      m2p = 1.0;
      break;
    case WeightLaw::uniform:
      m2p = std::pow(3.0, p) / (2.0 * p + 1.0);
      break;
    case WeightLaw::scaled_student_t: {
      if (!(law.df > 2.0 * p)) {
        throw RegimeError("weight_moment_constant: scaled-student-t(df=" +
                          std::to_string(law.df) + ") lacks " +
                          std::to_string(2 * p) + " finite moments (needs df > 2p)");
      }
      m2p = std::pow(law.df - 2.0, p) * std::tgamma(p + 0.5) *
            std::tgamma(0.5 * law.df - p) /
            (std::sqrt(kPi) * std::tgamma(0.5 * law.df));
      break;
    }
    default:
      throw ConfigError("weight_moment_constant: unknown law");
  }
  return std::pow(m2p, 2.0 / double(p));
}

MonteCarloValue operator_norm_moment(const WeightLawSpec& law, int n_in, int n_out,
                                     double c_w, double q, Rng& rng, int reps) {
  if (n_in < 1 || n_out < 1) throw ConfigError("operator_norm_moment: sizes >= 1");
  if (!(c_w >= 0.0)) throw ConfigError("operator_norm_moment: c_w >= 0 required");
  if (!(q > 0.0)) throw ConfigError("operator_norm_moment: q > 0 required");
  if (reps < 30) throw ConfigError("operator_norm_moment: reps >= 30 required");
  const double sd = std::sqrt(c_w / double(n_in));
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    Eigen::MatrixXd W(n_out, n_in);
    for (int i = 0; i < n_out; ++i) {
      for (int j = 0; j < n_in; ++j) W(i, j) = draw_weight(rng, law, sd);
    }
    // Power iteration on the smaller Gram matrix; all-ones start for
    // determinism, relative tolerance 1e-10 on the eigenvalue.
    const bool tall = n_out >= n_in;
    const Eigen::Index dim = tall ? n_in : n_out;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(dim) / std::sqrt(double(dim));
    double lam = 0.0;
    for (int it = 0; it < 10000; ++it) {
      Eigen::VectorXd w = tall ? Eigen::VectorXd(W.transpose() * (W * v))
                               : Eigen::VectorXd(W * (W.transpose() * v));
      const double norm = w.norm();
      if (norm == 0.0) {
        lam = 0.0;
        break;
      }
      v = w / norm;
      if (std::fabs(norm - lam) <= 1e-10 * std::max(1.0, norm)) {
        lam = norm;
        break;
      }
      lam = norm;
    }
    const double s_max = std::sqrt(lam);
    const double val = std::pow(s_max, q);
    sum += val;
    sum_sq += val * val;
  }
  const double mean = sum / reps;
  const double var = std::max(0.0, (sum_sq - reps * mean * mean) / (reps - 1.0));
  return MonteCarloValue{mean, std::sqrt(var / reps)};
}

}  // namespace steinfield
