#include <cmath>
#include <numbers>

#include "chns/diagnostics.hpp"
#include "chns/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chns;

TEST_CASE("coarsening-rate fit") {
  std::vector<double> t, e;
  for (int i = 1; i <= 200; ++i) {
    t.push_back(5.0 * i);
    e.push_back(7.0 * std::pow(5.0 * i, -0.5));
  }
  CHECK(fit_coarsening_rate(t, e) == doctest::Approx(-0.5).epsilon(1e-12));

  for (double& v : e) v = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) e[i] = 2.0 * std::pow(t[i], -0.304);
  CHECK(fit_coarsening_rate(t, e, TimeWindow{100.0, 1000.0}) == doctest::Approx(-0.304).epsilon(1e-12));

  CHECK(fit_coarsening_rate({1.0, 10.0}, {1.0, 0.1}, TimeWindow{1.0, 10.0}) == doctest::Approx(-1.0).epsilon(1e-14));

  CHECK_THROWS_WITH_AS(fit_coarsening_rate(t, e, TimeWindow{2000.0, 3000.0}), doctest::Contains("empty window"),
                       InvalidArgument);
  CHECK_THROWS_AS(fit_coarsening_rate({1.0, 2.0, 3.0}, {1.0, 0.0, 1.0}, TimeWindow{1.0, 3.0}), InvalidArgument);
  CHECK_THROWS_AS(fit_coarsening_rate({1.0, 2.0}, {1.0}), InvalidArgument);
}

TEST_CASE("fit is invariant under energy scaling") {
  testing::Gen gen(51);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> t, e;
    for (int i = 1; i <= 50; ++i) {
      t.push_back(i);
      e.push_back(std::exp(gen.uniform(-1, 1)) * std::pow(i, -0.4));
    }
    const double a = fit_coarsening_rate(t, e);
    const double c = gen.uniform(0.1, 10.0);
    for (double& v : e) v *= c;
    CHECK(fit_coarsening_rate(t, e) == doctest::Approx(a).epsilon(1e-10));
  }
}

TEST_CASE("L2 difference across meshes") {
  const auto coarse = testing::square_system(4);
  const auto fine = testing::square_system(8);
  auto affine = [](Point p) { return 2.0 * p.x - p.y + 0.5; };
  const Field a = interpolate(*fine, Space::scalar_p1, affine);
  const Field b = interpolate(*coarse, Space::scalar_p1, affine);
  CHECK(l2_difference(*fine, a, *coarse, b) <= 1e-14);

  const Field shifted = Field{Space::scalar_p1, b.coeffs.array() + 0.25};
  CHECK(l2_difference(*fine, a, *coarse, shifted) == doctest::Approx(0.25).epsilon(1e-13));

  // Bubbles of the coarse velocity count as well.
  Field u = zero_field(*coarse, Space::velocity_p1b);
  for (Index t = 0; t < coarse->mesh().n_triangles(); ++t) u.coeffs[coarse->bubble_dof(t)] = 1.0;
  const Field zero = zero_field(*fine, Space::velocity_p1b);
  // integral of (27 l0 l1 l2)^2 over K is 81 |K| / 280.
  CHECK(l2_difference(*fine, zero, *coarse, u, 0) == doctest::Approx(std::sqrt(81.0 / 280.0)).epsilon(1e-12));
  CHECK(l2_difference(*fine, zero, *coarse, u, 1) == 0.0);
}

TEST_CASE("Cauchy table") {
  CauchySetup setup;
  setup.phys.epsilon = 0.1;
  setup.scheme.freeze_velocity = true;
  setup.scheme.newton_tol = 1e-12;
  setup.T = 0.025;
  setup.dt_per_h = 0.1;
  setup.phi0 = [](Point p) { return 0.5 * std::cos(std::numbers::pi * p.x) * std::cos(2 * std::numbers::pi * p.y); };

  SUBCASE("identical levels differ by nothing") {
    const LevelSolution a = solve_level(setup, 3);
    const CauchyTable tab = cauchy_table({a, a});
    for (const auto& r : tab.rows) CHECK(r.error <= 1e-14);
  }

  SUBCASE("pure Cahn-Hilliard converges at second order") {
    const CauchyTable tab = cauchy_convergence(setup, {4, 5, 6});
    const auto rates = tab.rates("phi");
    REQUIRE(rates.size() == 1);
    CHECK(rates[0] > 1.8);
    CHECK(rates[0] < 2.3);
    CHECK(tab.warnings.empty());
  }

  SUBCASE("step counts must be integral") {
    setup.T = 0.0251;
    CHECK_THROWS_AS(solve_level(setup, 4), InvalidArgument);
  }
}

TEST_CASE("monotonicity pairing") {
  const auto fe = testing::square_system(4);
  PhysParams phys;
  phys.epsilon = 0.1;
  SchemeParams sp;
  sp.dt = 0.01;
  sp.newton_tol = 1e-12;
  Stepper st(fe, phys, sp);
  const Field phi0 = interpolate(*fe, Space::scalar_p1, [](Point p) { return 0.6 * std::cos(3.0 * p.x) * p.y; });
  const Field u0 = interpolate_velocity(*fe, [](Point p) {
    return Vec2{p.x * (1 - p.x) * p.y * (1 - p.y), 0.0};
  });
  const SimState frozen = st.startup_first_order(phi0, u0).state;

  const Field mu = Field{Space::scalar_p1, random_coefficients(fe->n_scalar_dofs(), 5)};
  CHECK(monotonicity_pairing(st, frozen, mu, mu) == 0.0);
  CHECK(monotonicity_pairing(st, frozen, mu, zero_field(*fe, Space::scalar_p1)) > 0.0);

  const MonotonicityReport rep = monotonicity_probe(st, frozen, 5, 77);
  CHECK(rep.trials.size() == 5);
  CHECK(rep.min_scaled > 0.0);
  const MonotonicityReport again = monotonicity_probe(st, frozen, 5, 77);
  for (std::size_t i = 0; i < 5; ++i) CHECK(again.trials[i].pairing == rep.trials[i].pairing);

  CHECK(random_coefficients(10, 3) == random_coefficients(10, 3));
  CHECK(random_coefficients(10, 3).cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("zero contour") {
  const auto fe = testing::square_system(16);
  const Field half = interpolate(*fe, Space::scalar_p1, [](Point p) { return p.x - 0.5; });
  const ContourMeasure c = zero_contour(*fe, half);
  CHECK(c.area == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(c.perimeter == doctest::Approx(1.0).epsilon(1e-13));

  const Field none = interpolate(*fe, Space::scalar_p1, [](Point) { return -1.0; });
  CHECK(zero_contour(*fe, none).isoperimetric_ratio() == 0.0);

  const auto fine = testing::square_system(64);
  const Field disc = interpolate(*fine, Space::scalar_p1, [](Point p) {
    return 0.3 - std::hypot(p.x - 0.5, p.y - 0.5);
  });
  const ContourMeasure d = zero_contour(*fine, disc);
  CHECK(d.area == doctest::Approx(std::numbers::pi * 0.09).epsilon(2e-3));
  CHECK(d.isoperimetric_ratio() > 0.99);
  CHECK(d.isoperimetric_ratio() <= 1.0);
}

TEST_CASE("series measures") {
  std::vector<EnergyRecord> s(4);
  const double e[] = {3.0, 2.5, 2.6, 1.0};
  const double m[] = {0.1, 0.1 + 1e-15, 0.1 - 2e-15, 0.1};
  for (int i = 0; i < 4; ++i) {
    s[static_cast<std::size_t>(i)].E_app = e[i];
    s[static_cast<std::size_t>(i)].mass = m[i];
  }
  CHECK(max_energy_increase(s) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(max_mass_drift(s) == doctest::Approx(2e-15).epsilon(1e-3));
}
