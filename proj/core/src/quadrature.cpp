#include "tsl/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "tsl/error.hpp"

namespace tsl {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

std::vector<double> running_integral_matrix(const GaussRule& rule) {
  const std::size_t n = rule.nodes.size();
  const auto& t = rule.nodes;
  auto lagrange = [&](std::size_t j, double x) {
    double v = 1.0;
    for (std::size_t m = 0; m < n; ++m)
      if (m != j) v *= (x - t[m]) / (t[j] - t[m]);
    return v;
  };
  // The same n-point rule integrates the degree n-1 basis exactly on [-1, t_i].
  std::vector<double> s(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double half = 0.5 * (t[i] + 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const double x = -1.0 + half * (t[m] + 1.0);
        acc += rule.weights[m] * lagrange(j, x);
      }
      s[i * n + j] = half * acc;
    }
  }
  return s;
}

}  // namespace tsl
