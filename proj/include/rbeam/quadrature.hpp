#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "rbeam/error.hpp"

namespace rbeam {

/// Gauss-Legendre rule mapped to the unit interval [0, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;

  int order() const { return static_cast<int>(points.size()); }
};

/// Nodes are found by Newton iteration on P_n starting from the Chebyshev-like
/// guess cos(pi (i + 3/4) / (n + 1/2)); converges to machine precision for n <= 64.
inline GaussRule gauss_legendre_unit(int n) {
  if (n < 1 || n > 64) throw InvalidParameter("gauss_legendre_unit: order must be in [1, 64]");
  GaussRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // [-1,1] -> [0,1]
    rule.points[i] = 0.5 * (1.0 - z);
    rule.points[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal panels.
template <class F>
double composite_gauss(F&& f, double a, double b, int panels, int order) {
  const GaussRule rule = gauss_legendre_unit(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double x0 = a + p * h;
    for (int q = 0; q < rule.order(); ++q) sum += rule.weights[q] * f(x0 + h * rule.points[q]);
  }
  return sum * h;
}

}  // namespace rbeam
