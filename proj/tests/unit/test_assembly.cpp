#include <cmath>

#include "chns/assembly.hpp"
#include "chns/error.hpp"
#include "chns/params.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chns;
using testing::dense;
using testing::Gen;

namespace {

std::array<double, 2> p1_gradient(const FeSystem& fe, const Vector& c, Index t) {
  const auto& tri = fe.mesh().triangles()[static_cast<std::size_t>(t)];
  const auto& g = fe.geometry(t);
  std::array<double, 2> out{0.0, 0.0};
  for (int a = 0; a < 3; ++a) {
    out[0] += c[tri[a]] * g.grad[a][0];
    out[1] += c[tri[a]] * g.grad[a][1];
  }
  return out;
}

// Quadrature integral of f(t, l) over the mesh with a rule independent of the
// ones used by assembly.
template <typename F>
double integrate_by(const FeSystem& fe, F&& f) {
  const QuadratureRule rule = collapsed_gauss_rule(7);
  double s = 0.0;
  for (Index t = 0; t < fe.mesh().n_triangles(); ++t) {
    for (const auto& q : rule) s += fe.geometry(t).area * q.weight * f(t, q.bary);
  }
  return s;
}

}  // namespace

TEST_CASE("P1 mass") {
  const auto fe = testing::square_system(6);
  const Eigen::MatrixXd m = dense(assemble_p1_mass(*fe));
  CHECK(m.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((m - m.transpose()).norm() == 0.0);

  const auto one = testing::one_triangle(1.0, 0.3, 0.5);
  const double area = one->geometry(0).area;
  const Eigen::MatrixXd m1 = dense(assemble_p1_mass(*one));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(m1(i, j) == doctest::Approx(i == j ? area / 6 : area / 12).epsilon(1e-14));
  }

  Gen gen(11);
  const SparseOperator ms = assemble_p1_mass(*fe);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector c = gen.vector(fe->n_scalar_dofs());
    const double exact = integrate_by(*fe, [&](Index t, const auto& l) {
      const double v = eval_scalar_at(*fe, c, t, l);
      return v * v;
    });
    CHECK(c.dot(ms * c) == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("P1b mass matches quadrature of velocity fields") {
  const auto fe = testing::square_system(4, 1.5, 1.0);
  const SparseOperator m = assemble_mass(*fe, Space::velocity_p1b);
  Gen gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector u = gen.vector(fe->n_velocity_dofs());
    const double exact = integrate_by(*fe, [&](Index t, const auto& l) {
      const Vec2 v = eval_velocity_at(*fe, u, t, l);
      return v.x * v.x + v.y * v.y;
    });
    CHECK(u.dot(m * u) == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("P1 stiffness") {
  const auto fe = testing::square_system(8);
  const SparseOperator k = assemble_p1_stiffness(*fe);
  const Eigen::MatrixXd kd = dense(k);
  CHECK((kd - kd.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((kd * Vector::Ones(kd.cols())).cwiseAbs().maxCoeff() <= 1e-13);
  const Field x = interpolate(*fe, Space::scalar_p1, [](Point p) { return p.x; });
  CHECK(x.coeffs.dot(k * x.coeffs) == doctest::Approx(1.0).epsilon(1e-14));

  Gen gen(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector c = gen.vector(fe->n_scalar_dofs());
    CHECK(c.dot(k * c) >= 0.0);
  }
}

TEST_CASE("mobility-weighted stiffness") {
  const double eps = 0.04;
  const auto fe = testing::square_system(5);
  const Mobility mob = Mobility::regularized_degenerate(0.1);
  const PointwiseMap g = [&](double phi) { return mob(phi, eps); };
  const Vector zero = Vector::Zero(fe->n_scalar_dofs());
  const SparseOperator km = assemble_p1_stiffness(*fe, &zero, g, true);
  const SparseOperator k = assemble_p1_stiffness(*fe);
  CHECK((dense(km) - 0.1 * std::sqrt(1.0 + eps * eps) * dense(k)).cwiseAbs().maxCoeff() <= 1e-13);

  const PointwiseMap bad = [](double phi) { return phi; };
  CHECK_THROWS_AS(assemble_p1_stiffness(*fe, &zero, bad, true), InvalidArgument);
}

TEST_CASE("P1b stiffness annihilates constants and is symmetric") {
  const auto fe = testing::square_system(4);
  const Eigen::MatrixXd k = dense(assemble_p1b_stiffness(*fe));
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  Vector one = Vector::Zero(fe->n_block_dofs());
  one.head(fe->n_scalar_dofs()).setOnes();
  CHECK((k * one).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("convection is skew-symmetric") {
  const auto fe = testing::square_system(5);
  Gen gen(14);
  for (int trial = 0; trial < 100; ++trial) {
    const Field w = gen.field(*fe, Space::velocity_p1b);
    const Vector v = gen.vector(fe->n_velocity_dofs());
    const SparseOperator n = assemble_convection(*fe, w);
    CHECK(std::abs(v.dot(n * v)) <= 1e-14 * std::max(1.0, v.squaredNorm()));
  }
  const SparseOperator n0 = assemble_convection(*fe, zero_field(*fe, Space::velocity_p1b));
  CHECK(dense(n0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("convection entries match an independent quadrature") {
  const auto fe = testing::one_triangle(1.2, 0.3, 0.9);
  Gen gen(15);
  const Vector w = gen.vector(fe->n_velocity_dofs());
  const Eigen::MatrixXd n = dense(assemble_convection_block(*fe, w));
  const auto& geo = fe->geometry(0);
  const QuadratureRule rule = collapsed_gauss_rule(7);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (const auto& q : rule) {
        const Vec2 wq = eval_velocity_at(*fe, w, 0, q.bary);
        const auto val = p1b_values(q.bary);
        const auto grad = p1b_gradients(geo, q.bary);
        const double wgj = wq.x * grad[j][0] + wq.y * grad[j][1];
        const double wgi = wq.x * grad[i][0] + wq.y * grad[i][1];
        s += q.weight * 0.5 * (wgj * val[i] - wgi * val[j]);
      }
      s *= geo.area;
      CHECK(n(i, j) == doctest::Approx(s).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("phase coupling") {
  const auto fe = testing::square_system(5);
  const SparseOperator g0 = assemble_phase_coupling(*fe, zero_field(*fe, Space::scalar_p1));
  CHECK(dense(g0).cwiseAbs().maxCoeff() == 0.0);

  // phi_tilde = 1, mu = x: (G mu) . v = integral v_x.
  const Field one = interpolate(*fe, Space::scalar_p1, [](Point) { return 1.0; });
  const Field x = interpolate(*fe, Space::scalar_p1, [](Point p) { return p.x; });
  const SparseOperator g1 = assemble_phase_coupling(*fe, one);
  Gen gen(16);
  const Vector v = gen.vector(fe->n_velocity_dofs());
  const double exact = integrate_by(*fe, [&](Index t, const auto& l) { return eval_velocity_at(*fe, v, t, l).x; });
  CHECK(v.dot(g1 * x.coeffs) == doctest::Approx(exact).epsilon(1e-13));

  for (int trial = 0; trial < 10; ++trial) {
    const Field pt = gen.field(*fe, Space::scalar_p1);
    const Vector mu = gen.vector(fe->n_scalar_dofs());
    const Vector vv = gen.vector(fe->n_velocity_dofs());
    const double ref = integrate_by(*fe, [&](Index t, const auto& l) {
      const auto gm = p1_gradient(*fe, mu, t);
      const Vec2 vq = eval_velocity_at(*fe, vv, t, l);
      return eval_scalar_at(*fe, pt.coeffs, t, l) * (gm[0] * vq.x + gm[1] * vq.y);
    });
    CHECK(vv.dot(assemble_phase_coupling(*fe, pt) * mu) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("pressure gradient and divergence") {
  const auto fe = testing::square_system(6);
  const SparseOperator b = assemble_pressure_gradient(*fe);
  CHECK((b * Vector::Ones(fe->n_scalar_dofs())).cwiseAbs().maxCoeff() <= 1e-14);

  // grad x = (1, 0); its pairing with the x-bubble of K is 27 |K| / 60.
  const Field x = interpolate(*fe, Space::scalar_p1, [](Point p) { return p.x; });
  const Vector bx = b * x.coeffs;
  for (Index t = 0; t < fe->mesh().n_triangles(); ++t) {
    CHECK(bx[fe->velocity_dof(0, fe->bubble_dof(t))] == doctest::Approx(0.45 * fe->geometry(t).area).epsilon(1e-13));
    CHECK(std::abs(bx[fe->velocity_dof(1, fe->bubble_dof(t))]) <= 1e-15);
  }

  // For velocities vanishing on the boundary, (div u, q) = -(u, grad q).
  const SparseOperator d = assemble_divergence(*fe);
  Gen gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    Vector u = gen.vector(fe->n_velocity_dofs());
    for (Index dof : fe->dirichlet_velocity_dofs()) u[dof] = 0.0;
    const Vector q = gen.vector(fe->n_scalar_dofs());
    CHECK(q.dot(d * u) == doctest::Approx(-u.dot(b * q)).epsilon(1e-12));
  }
}
