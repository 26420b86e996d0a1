#pragma once

#include <array>
#include <vector>

namespace chns {

/// Quadrature node in barycentric coordinates. Weights are normalized to the
/// reference measure, so that integral over K ~= |K| * sum_q w_q f(x_q).
struct QuadraturePoint {
  std::array<double, 3> bary;
  double weight;
};

using QuadratureRule = std::vector<QuadraturePoint>;

/// Rule with positive weights that integrates every polynomial of total
/// degree <= `degree` exactly on a triangle. Degrees up to 4 use the
/// classical 1/3/6-point symmetric rules; higher degrees use a collapsed
/// Gauss-Legendre product rule.
const QuadratureRule& triangle_rule(int degree);

/// Collapsed Gauss-Legendre product rule with n x n points; exact to degree 2n-2.
QuadratureRule collapsed_gauss_rule(int n);

/// Gauss-Legendre nodes and weights on [0,1].
std::vector<std::array<double, 2>> gauss_legendre(int n);

constexpr int kMaxRuleDegree = 24;

}  // namespace chns
