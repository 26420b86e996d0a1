#include <cmath>

#include "chns/energy.hpp"
#include "chns/stepper.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chns;

namespace {

PhysParams phys() {
  PhysParams p;
  p.epsilon = 0.05;
  p.We_star = 12.0;
  return p;
}

SimState random_state(const FeSystem& fe, testing::Gen& gen) {
  SimState s;
  s.phi_k = gen.field(fe, Space::scalar_p1);
  s.phi_km1 = gen.field(fe, Space::scalar_p1);
  s.u_k = gen.field(fe, Space::velocity_p1b);
  s.u_km1 = gen.field(fe, Space::velocity_p1b);
  s.p_k = gen.field(fe, Space::pressure_p1_meanzero);
  remove_mean(fe, s.p_k.coeffs);
  s.mu_half = zero_field(fe, Space::scalar_p1);
  s.k = 3;
  s.t = 0.3;
  return s;
}

}  // namespace

TEST_CASE("pure phases carry no surface energy") {
  const auto fe = testing::square_system(5, 2.0, 1.0);
  EnergyEvaluator ev(fe);
  const Field one = interpolate(*fe, Space::scalar_p1, [](Point) { return 1.0; });
  const Field minus = interpolate(*fe, Space::scalar_p1, [](Point) { return -1.0; });
  CHECK(ev.surface(one, phys()) <= 1e-16);
  CHECK(ev.surface(minus, phys()) <= 1e-16);
  CHECK(ev.bulk(one) <= 1e-30);

  // phi = 0 sits on top of the well: f0 = 1/4 everywhere.
  const Field zero = zero_field(*fe, Space::scalar_p1);
  const PhysParams p = phys();
  CHECK(ev.surface(zero, p) == doctest::Approx(0.25 * 2.0 / (p.epsilon * p.We_star)).epsilon(1e-14));
}

TEST_CASE("bulk energy matches an independent quadrature") {
  const auto fe = testing::square_system(4);
  EnergyEvaluator ev(fe);
  testing::Gen gen(41);
  const QuadratureRule rule = collapsed_gauss_rule(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Field phi = Field{Space::scalar_p1, gen.vector(fe->n_scalar_dofs(), -1.5, 1.5)};
    double ref = 0.0;
    for (Index t = 0; t < fe->mesh().n_triangles(); ++t) {
      for (const auto& q : rule) ref += fe->geometry(t).area * q.weight * double_well(eval_scalar_at(*fe, phi.coeffs, t, q.bary));
    }
    CHECK(ev.bulk(phi) == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("energy record invariants") {
  const auto fe = testing::square_system(6);
  EnergyEvaluator ev(fe);
  testing::Gen gen(42);
  const PhysParams p = phys();
  const double dt = 0.05;
  for (int trial = 0; trial < 20; ++trial) {
    const SimState s = random_state(*fe, gen);
    const EnergyRecord e = ev.compute(s, p, dt);
    CHECK(e.kinetic >= 0.0);
    CHECK(e.surface >= 0.0);
    CHECK(e.E_ht == doctest::Approx(e.kinetic + e.surface).epsilon(1e-15));
    const double jump = ev.l2_sq(s.phi_k.coeffs - s.phi_km1.coeffs);
    const double grad_p = ev.pressure_gradient_sq(s.p_k);
    CHECK(e.E_app == doctest::Approx(e.E_ht + 0.25 * p.coupling() * jump + dt * dt / 8 * grad_p).epsilon(1e-14));
    CHECK(e.E_app >= e.E_ht);
    CHECK(e.mass == doctest::Approx(integrate(*fe, s.phi_k)).epsilon(1e-14));
    CHECK(e.kinetic == doctest::Approx(ev.kinetic(s.u_k)).epsilon(1e-15));

    // The discrete gradient norm is a projection of the exact one.
    const double disc = ev.discrete_pressure_gradient_sq(s.p_k);
    CHECK(disc >= 0.0);
    CHECK(disc <= grad_p * (1.0 + 1e-12));
    CHECK(e.E_app_discrete <= e.E_app * (1.0 + 1e-12));
  }
}

TEST_CASE("gradient energy of an affine field") {
  const auto fe = testing::square_system(7);
  EnergyEvaluator ev(fe);
  const PhysParams p = phys();
  const Field phi = interpolate(*fe, Space::scalar_p1, [](Point q) { return 0.5 * q.x - 0.25; });
  double bulk = 0.0;
  // f0 of an affine function integrates in closed form through its antiderivative.
  const auto antider = [](double s) { return (s - 2.0 * std::pow(s, 3) / 3.0 + std::pow(s, 5) / 5.0) / 4.0; };
  bulk = (antider(0.25) - antider(-0.25)) / 0.5;
  const double ref = (bulk / p.epsilon + 0.5 * p.epsilon * 0.25) / p.We_star;
  CHECK(ev.surface(phi, p) == doctest::Approx(ref).epsilon(1e-13));
}
