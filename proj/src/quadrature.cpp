#include "biot/fem.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace biot {

namespace {

// Legendre P_n(x) and its derivative.
std::pair<double, double> legendre(int n, double x)
{
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

} // namespace

void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights)
{
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double dp = legendre(n, x).second;
    // map [-1,1] -> [0,1]
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule quadrature_rule(int dim, int exactness_degree)
{
  if (dim < 1 || dim > 3)
    throw FemError("quadrature_rule: dimension must be 1, 2 or 3");
  if (exactness_degree < 0 || exactness_degree > 6)
    throw FemError("quadrature_rule: unsupported exactness degree " + std::to_string(exactness_degree));

  // The collapsed map adds up to dim-1 powers of the radial variable.
  const int m = (exactness_degree + dim) / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre(m, x, w);

  QuadratureRule rule;
  rule.dim = dim;
  rule.degree = exactness_degree;
  if (dim == 1) {
    for (int i = 0; i < m; ++i) {
      rule.points.push_back({1.0 - x[i], x[i], 0.0, 0.0});
      rule.weights.push_back(w[i]);
    }
  } else if (dim == 2) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double a = x[i];
        const double b = x[j] * (1.0 - x[i]);
        rule.points.push_back({1.0 - a - b, a, b, 0.0});
        rule.weights.push_back(w[i] * w[j] * (1.0 - x[i]));
      }
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const double a = x[i];
          const double b = x[j] * (1.0 - x[i]);
          const double c = x[k] * (1.0 - x[i]) * (1.0 - x[j]);
          rule.points.push_back({1.0 - a - b - c, a, b, c});
          rule.weights.push_back(w[i] * w[j] * w[k] * (1.0 - x[i]) * (1.0 - x[i]) * (1.0 - x[j]));
        }
  }
  return rule;
}

} // namespace biot
