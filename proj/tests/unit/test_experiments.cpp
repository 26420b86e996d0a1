#include <cmath>

#include "chns/error.hpp"
#include "chns/experiments.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chns;

TEST_CASE("scenario tags round-trip") {
  for (ScenarioTag t : {ScenarioTag::convergence, ScenarioTag::energy_mass, ScenarioTag::relax_quiescent,
                        ScenarioTag::relax_shear, ScenarioTag::spinodal, ScenarioTag::coarsening}) {
    CHECK(parse_scenario_tag(to_string(t)) == t);
  }
  CHECK_THROWS_AS(parse_scenario_tag("spinodal_decomposition"), InvalidArgument);
}

TEST_CASE("default scenarios validate") {
  for (ScenarioTag t : {ScenarioTag::convergence, ScenarioTag::energy_mass, ScenarioTag::relax_quiescent,
                        ScenarioTag::relax_shear}) {
    CHECK_NOTHROW(default_scenario(t).validate());
  }
  for (ScenarioTag t : {ScenarioTag::spinodal, ScenarioTag::coarsening}) {
    Scenario s = default_scenario(t);
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("seed required"), InvalidArgument);
    s.seed = 1;
    CHECK_NOTHROW(s.validate());
  }
  Scenario s = default_scenario(ScenarioTag::energy_mass);
  CHECK(s.warnings().empty());
  s.phys.epsilon = 0.005;
  CHECK(!s.warnings().empty());
  s.T = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("square initial shape") {
  const auto fe = testing::square_system(8);
  const double eps = 0.02;
  const Field phi = ic_square_shape(*fe, Point{0.5, 0.5}, 0.25, eps);
  CHECK(eval_scalar(*fe, phi, Point{0.5, 0.5}) == doctest::Approx(std::tanh(0.25 / (std::sqrt(2.0) * eps))));
  CHECK(std::abs(eval_scalar(*fe, phi, Point{0.25, 0.5})) <= 1e-15);
  CHECK(std::abs(eval_scalar(*fe, phi, Point{0.5, 0.75})) <= 1e-15);
  CHECK(eval_scalar(*fe, phi, Point{0.0, 0.0}) < -0.999);
  CHECK(phi.coeffs.cwiseAbs().maxCoeff() < 1.0);

  // Mirror symmetry about both center lines.
  const Field mirrored = interpolate(*fe, Space::scalar_p1, [&](Point p) { return eval_scalar(*fe, phi, Point{1 - p.x, p.y}); });
  CHECK((mirrored.coeffs - phi.coeffs).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK_THROWS_AS(ic_square_shape(*fe, Point{0.9, 0.5}, 0.2, eps), OutsideDomain);
  CHECK_THROWS_AS(ic_square_shape(*fe, Point{0.5, 0.5}, -0.1, eps), InvalidArgument);
}

TEST_CASE("spinodal initial data") {
  const auto fe = testing::square_system(16);
  const Field a = ic_spinodal(*fe, -0.05, 0.05, 99);
  const Field b = ic_spinodal(*fe, -0.05, 0.05, 99);
  const Field c = ic_spinodal(*fe, -0.05, 0.05, 100);
  CHECK((a.coeffs - b.coeffs).norm() == 0.0);
  CHECK((a.coeffs - c.coeffs).norm() > 0.0);
  CHECK(a.coeffs.maxCoeff() <= 0.0);
  CHECK(a.coeffs.minCoeff() >= -0.1);
  CHECK(a.coeffs.mean() == doctest::Approx(-0.05).epsilon(0.1));
  CHECK_THROWS_AS(ic_spinodal(*fe, 0.5, 0.6, 1), InvalidArgument);
}

TEST_CASE("lid-driven Stokes flow") {
  const auto fe = testing::square_system(16);
  const Field zero = ic_lid_driven_stokes(*fe, [](double) { return 0.0; });
  CHECK(zero.coeffs.cwiseAbs().maxCoeff() == 0.0);

  const Field u = ic_lid_driven_stokes(*fe, [](double x) { return x * (1 - x); });
  const SparseOperator b = assemble_pressure_gradient(*fe);
  CHECK((b.transpose() * u.coeffs).cwiseAbs().maxCoeff() <= 1e-11);
  const Vec2 top = eval_velocity(*fe, u, Point{0.5, 1.0});
  CHECK(top.x == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(top.y == 0.0);
  const Vec2 bottom = eval_velocity(*fe, u, Point{0.5, 0.0});
  CHECK(bottom.x == 0.0);
  // The recirculating cell flows backwards below the lid.
  CHECK(eval_velocity(*fe, u, Point{0.5, 0.25}).x < 0.0);

  CHECK_THROWS_AS(ic_lid_driven_stokes(*fe, [](double) { return 1.0; }), InvalidArgument);
}

TEST_CASE("lid boundary data") {
  Scenario s = default_scenario(ScenarioTag::relax_shear);
  const VelocityBoundary bc = boundary_for(s);
  REQUIRE(bc.value);
  CHECK(bc.value(Point{0.5, 1.0}).x == doctest::Approx(s.bc.lid_scale * 0.25));
  CHECK(bc.value(Point{0.5, 0.0}).x == 0.0);
  CHECK(!boundary_for(default_scenario(ScenarioTag::relax_quiescent)).value);
}

TEST_CASE("scenario runs are deterministic") {
  Scenario s = default_scenario(ScenarioTag::relax_quiescent);
  s.mesh = MeshSpec{16, 16, Rectangle{}};
  s.phys.epsilon = 0.08;
  s.scheme.dt = 0.01;
  s.T = 0.05;
  const RunArtifacts a = run_scenario(s);
  const RunArtifacts b = run_scenario(s);
  REQUIRE(a.rows.size() == 5);
  CHECK((a.final_state.phi_k.coeffs - b.final_state.phi_k.coeffs).norm() == 0.0);
  CHECK((a.final_state.u_k.coeffs - b.final_state.u_k.coeffs).norm() == 0.0);
  CHECK(a.final_state.t == doctest::Approx(0.05));

  // The square starts at rest; capillary forces set the fluid in motion
  // while the total energy decays.
  CHECK(a.initial.kinetic == 0.0);
  CHECK(a.rows.front().energy.kinetic > 0.0);
  double prev = a.initial.E_app;
  for (const auto& r : a.rows) {
    CHECK(r.energy.E_app <= prev);
    CHECK(std::abs(r.energy.mass - a.initial.mass) <= 1e-14);
    prev = r.energy.E_app;
  }

  RunOptions opts;
  opts.max_steps = 2;
  int calls = 0;
  opts.on_step = [&](const SimState&, const StepReport&) { ++calls; };
  CHECK(run_scenario(s, opts).rows.size() == 2);
  CHECK(calls == 2);
}
