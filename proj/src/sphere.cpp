#include "steinfield/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "steinfield/csv.hpp"
#include "steinfield/errors.hpp"
#include "steinfield/quadrature.hpp"

namespace steinfield {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SpherePoint::SpherePoint(Eigen::VectorXd c) : coords(std::move(c)) {
  if (coords.size() < 2) {
    throw ConfigError("SpherePoint: need at least 2 coordinates (n >= 1)");
  }
  const double norm = coords.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ConfigError("SpherePoint: cannot normalize a zero/non-finite vector");
  }
  coords /= norm;
}

double geodesic_distance(const SpherePoint& x, const SpherePoint& y) {
  const double dot = x.coords.dot(y.coords);
  return std::acos(std::clamp(dot, -1.0, 1.0));
}

double chordal_distance(const SpherePoint& x, const SpherePoint& y) {
  return (x.coords - y.coords).norm();
}

double sphere_area(int n) {
  if (n < 1) throw ConfigError("sphere_area: n >= 1 required");
  return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

std::vector<SpherePoint> uniform_sample(Rng& rng, int n, int count) {
  if (n < 1) throw ConfigError("uniform_sample: n >= 1 required");
  if (count < 1) throw ConfigError("uniform_sample: count >= 1 required");
  std::vector<SpherePoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v(n + 1);
    for (int j = 0; j <= n; ++j) v[j] = rng.normal();
    out.emplace_back(std::move(v));
  }
  return out;
}

SphereGrid uniform_grid(Rng& rng, int n, int count) {
  SphereGrid g;
  g.dim_n = n;
  g.points = uniform_sample(rng, n, count);
  g.construction_tag = "uniform-random";
  return g;
}

SphereGrid quadrature_nodes(int n, int level) {
  if (level < 1) throw ConfigError("quadrature_nodes: level >= 1 required");
  SphereGrid g;
  g.dim_n = n;
  if (n == 1) {
    const int m = level;
    g.points.reserve(m);
    g.weights.assign(m, 2.0 * kPi / m);
    for (int i = 0; i < m; ++i) {
      const double theta = 2.0 * kPi * i / m;
      Eigen::VectorXd v(2);
      v << std::cos(theta), std::sin(theta);
      g.points.emplace_back(std::move(v));
    }
    g.construction_tag = "equiangular";
  } else if (n == 2) {
    const QuadratureRule polar = gauss_legendre(level);  // nodes in cos(phi)
    const int m_az = 2 * level + 1;
    const double w_az = 2.0 * kPi / m_az;
    g.points.reserve(static_cast<std::size_t>(level) * m_az);
    g.weights.reserve(static_cast<std::size_t>(level) * m_az);
    for (int i = 0; i < level; ++i) {
      const double c = polar.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < m_az; ++j) {
        const double theta = 2.0 * kPi * j / m_az;
        Eigen::VectorXd v(3);
        v << s * std::cos(theta), s * std::sin(theta), c;
        g.points.emplace_back(std::move(v));
        g.weights.push_back(polar.weights[i] * w_az);
      }
    }
    g.construction_tag = "product-quadrature";
  } else {
    throw ConfigError(
        "quadrature_nodes: only n in {1, 2} carry quadrature rules; use "
        "Monte Carlo grids for higher dimensions");
  }
  return g;
}

SphereGrid fibonacci_grid(int count) {
  if (count < 1) throw ConfigError("fibonacci_grid: count >= 1 required");
  SphereGrid g;
  g.dim_n = 2;
  g.points.reserve(count);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < count; ++i) {
    // Latitudes at midpoints of an equal-area split, golden-angle azimuth.
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double theta = 2.0 * kPi * i / golden;
    Eigen::VectorXd v(3);
    v << r * std::cos(theta), r * std::sin(theta), z;
    g.points.emplace_back(std::move(v));
  }
  g.construction_tag = "fibonacci";
  return g;
}

SphereGrid greedy_net(const SphereGrid& grid, double eps) {
  if (grid.points.empty()) throw ConfigError("greedy_net: empty grid");
  if (!(eps > 0.0)) throw ConfigError("greedy_net: eps > 0 required");

  const std::size_t m = grid.points.size();
  std::vector<std::size_t> net_indices{0};
  std::vector<double> dist(m);
  for (std::size_t i = 0; i < m; ++i) {
    dist[i] = geodesic_distance(grid.points[i], grid.points[0]);
  }
  while (true) {
    std::size_t far = 0;
    double far_dist = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (dist[i] > far_dist) {
        far_dist = dist[i];
        far = i;
      }
    }
    if (far_dist <= eps) break;
    net_indices.push_back(far);
    for (std::size_t i = 0; i < m; ++i) {
      dist[i] = std::min(dist[i], geodesic_distance(grid.points[i], grid.points[far]));
    }
  }

  SphereGrid net;
  net.dim_n = grid.dim_n;
  net.construction_tag = grid.construction_tag;
  net.points.reserve(net_indices.size());
  for (std::size_t idx : net_indices) net.points.push_back(grid.points[idx]);
  return net;
}

long long covering_number_bound(int n, double eps, double c_override) {
  if (n < 1) throw ConfigError("covering_number_bound: n >= 1 required");
  if (!(eps > 0.0)) throw ConfigError("covering_number_bound: eps > 0 required");
  double c = c_override;
  if (c <= 0.0) {
    if (n == 1) {
      c = kPi;
    } else if (n == 2) {
      c = 16.0;
    } else {
      throw ConfigError(
          "covering_number_bound: no default constant for n >= 3; pass "
          "c_override > 0");
    }
  }
  const double bound = c * std::pow(eps, -n);
  if (!(bound < 9e18)) {
    throw NumericalError("covering_number_bound: bound overflows integer range");
  }
  return static_cast<long long>(std::ceil(bound));
}

void write_grid_csv(const SphereGrid& grid, const std::string& path) {
  CsvWriter w(path);
  std::vector<std::string> header;
  for (int j = 0; j <= grid.dim_n; ++j) header.push_back("coord_" + std::to_string(j));
  if (grid.has_weights()) header.push_back("weight");
  w.row(header);
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    std::vector<std::string> row;
    for (int j = 0; j <= grid.dim_n; ++j) {
      row.push_back(format_full(grid.points[i].coords[j]));
    }
    if (grid.has_weights()) row.push_back(format_full(grid.weights[i]));
    w.row(row);
  }
}

}  // namespace steinfield
