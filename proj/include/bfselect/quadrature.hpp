#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "bfselect/box_domain.hpp"

namespace bfselect {

/// Nodes and weights of a quadrature rule on [-1, 1].
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule with n points; exact for polynomials up to degree
/// 2n - 1. Nodes are the roots of the Legendre polynomial P_n, found by
/// Newton iteration from the Chebyshev initial guess.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n(x) and P_{n-1}(x) by the three-term recurrence.
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// The same rule mapped to [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
  QuadratureRule rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half_width = 0.5 * (b - a);
  rule.nodes = (rule.nodes.array() * half_width + mid).matrix();
  rule.weights *= half_width;
  return rule;
}

/// Tensor-product Gauss-Legendre integral of f over a box, with
/// points_per_dim nodes in each dimension. f takes a d-vector and returns a
/// double. A box with any zero-width edge integrates to 0.
template <class F>
double integrate(const BoxDomain& box, int points_per_dim, F&& f) {
  if (points_per_dim < 1) {
    throw std::invalid_argument("integrate: points_per_dim >= 1 required");
  }
  const int d = box.dimension();
  std::vector<QuadratureRule> rules;
  rules.reserve(d);
  for (int k = 0; k < d; ++k) {
    rules.push_back(
        gauss_legendre(points_per_dim, box.lower()[k], box.upper()[k]));
  }

  std::vector<int> idx(d, 0);
  Eigen::VectorXd x(d);
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      x[k] = rules[k].nodes[idx[k]];
      w *= rules[k].weights[idx[k]];
    }
    total += w * f(x);
    // odometer over the tensor grid, last dimension fastest
    int k = d - 1;
    while (k >= 0 && ++idx[k] == points_per_dim) idx[k--] = 0;
    if (k < 0) break;
  }
  return total;
}

}  // namespace bfselect
