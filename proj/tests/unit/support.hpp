#pragma once

// Shared helpers for the unit tests: seeded generators and small oracles.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

#include "chns/assembly.hpp"
#include "chns/fespace.hpp"
#include "chns/mesh.hpp"

namespace chns::testing {

/// Hand-rolled generator: every property test draws its cases from one of
/// these so that a failing case is reproducible from the printed seed.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  Vector vector(Index n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  Field field(const FeSystem& fe, Space s) { return Field{s, vector(fe.n_dofs(s))}; }

private:
  std::mt19937_64 rng_;
};

inline std::shared_ptr<const FeSystem> square_system(Index n, double lx = 1.0, double ly = 1.0) {
  return std::make_shared<const FeSystem>(std::make_shared<const Mesh>(build_uniform_mesh(n, n, Rectangle{lx, ly})));
}

/// Single counterclockwise triangle (0,0), (a,0), (b,c).
inline std::shared_ptr<const FeSystem> one_triangle(double a = 1.0, double b = 0.2, double c = 0.8) {
  return std::make_shared<const FeSystem>(
      std::make_shared<const Mesh>(Mesh({{0.0, 0.0}, {a, 0.0}, {b, c}}, {{0, 1, 2}})));
}

inline Eigen::MatrixXd dense(const SparseOperator& a) { return Eigen::MatrixXd(a); }

/// Physical coordinates of a barycentric point in triangle t.
inline Point physical(const Mesh& m, Index t, const std::array<double, 3>& l) {
  const auto& tri = m.triangles()[static_cast<std::size_t>(t)];
  Point p;
  for (int i = 0; i < 3; ++i) {
    p.x += l[i] * m.vertices()[static_cast<std::size_t>(tri[i])].x;
    p.y += l[i] * m.vertices()[static_cast<std::size_t>(tri[i])].y;
  }
  return p;
}

inline double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

/// Average over a triangle of l0^a l1^b l2^c.
inline double barycentric_moment(int a, int b, int c) {
  return 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

}  // namespace chns::testing
