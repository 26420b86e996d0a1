#include "chns/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "chns/error.hpp"

namespace chns {

std::vector<std::array<double, 2>> gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre needs n >= 1");
  // Returns (P_n(x), P_n'(x)) by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    return std::array<double, 2>{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  std::vector<std::array<double, 2>> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x)[1];
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out[static_cast<std::size_t>(i)] = {0.5 * (1.0 - x), 0.5 * w};
  }
  return out;
}

QuadratureRule collapsed_gauss_rule(int n) {
  const auto gl = gauss_legendre(n);
  QuadratureRule rule;
  rule.reserve(static_cast<std::size_t>(n * n));
  for (const auto& [s, ws] : gl) {
    for (const auto& [t, wt] : gl) {
      const double x = s;
      const double y = t * (1.0 - s);
      // Reference triangle has area 1/2; normalize to unit total weight.
      rule.push_back({{1.0 - x - y, x, y}, 2.0 * ws * wt * (1.0 - s)});
    }
  }
  return rule;
}

namespace {

QuadratureRule symmetric_rule(int degree) {
  if (degree <= 1) return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 1.0}};
  if (degree == 2) {
    const double a = 2.0 / 3.0;
    const double b = 1.0 / 6.0;
    return {{{a, b, b}, 1.0 / 3.0}, {{b, a, b}, 1.0 / 3.0}, {{b, b, a}, 1.0 / 3.0}};
  }
  // Six-point degree-4 rule.
  const double a1 = 0.445948490915965;
  const double w1 = 0.223381589678011;
  const double a2 = 0.091576213509771;
  const double w2 = 0.109951743655322;
  QuadratureRule rule;
  for (auto [a, w] : {std::array<double, 2>{a1, w1}, std::array<double, 2>{a2, w2}}) {
    const double b = 1.0 - 2.0 * a;
    rule.push_back({{b, a, a}, w});
    rule.push_back({{a, b, a}, w});
    rule.push_back({{a, a, b}, w});
  }
  return rule;
}

}  // namespace

const QuadratureRule& triangle_rule(int degree) {
  static const std::vector<QuadratureRule> rules = [] {
    std::vector<QuadratureRule> r;
    for (int d = 0; d <= kMaxRuleDegree; ++d) {
      r.push_back(d <= 4 ? symmetric_rule(d) : collapsed_gauss_rule((d + 3) / 2));
    }
    return r;
  }();
  if (degree < 0 || degree > kMaxRuleDegree) throw InvalidArgument("unsupported quadrature degree");
  return rules[static_cast<std::size_t>(degree)];
}

}  // namespace chns
