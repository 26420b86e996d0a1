#include "chns/experiments.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "chns/assembly.hpp"
#include "chns/error.hpp"

namespace chns {

namespace {

constexpr double kPi = std::numbers::pi;

struct TagName {
  ScenarioTag tag;
  const char* name;
};
constexpr TagName kTags[] = {{ScenarioTag::convergence, "convergence"},
                             {ScenarioTag::energy_mass, "energy_mass"},
                             {ScenarioTag::relax_quiescent, "relax_quiescent"},
                             {ScenarioTag::relax_shear, "relax_shear"},
                             {ScenarioTag::spinodal, "spinodal"},
                             {ScenarioTag::coarsening, "coarsening"}};

std::int64_t step_count(double T, double dt) {
  const double r = T / dt;
  const auto n = static_cast<std::int64_t>(std::llround(r));
  if (std::abs(r - static_cast<double>(n)) <= 1e-9 * std::max(r, 1.0)) return n;
  return static_cast<std::int64_t>(std::ceil(r));
}

}  // namespace

std::string to_string(ScenarioTag tag) {
  for (const auto& t : kTags) {
    if (t.tag == tag) return t.name;
  }
  return "unknown";
}

ScenarioTag parse_scenario_tag(const std::string& s) {
  for (const auto& t : kTags) {
    if (s == t.name) return t.tag;
  }
  throw InvalidArgument("unknown scenario '" + s +
                        "' (expected convergence, energy_mass, relax_quiescent, relax_shear, spinodal or coarsening)");
}

void Scenario::validate() const {
  phys.validate();
  scheme.validate();
  if (mesh.nx < 1 || mesh.ny < 1) throw InvalidArgument("mesh nx >= 1 and ny >= 1 required");
  if (!(mesh.domain.lx > 0.0 && mesh.domain.ly > 0.0)) throw InvalidArgument("domain lengths > 0 required");
  if (!(T > 0.0)) throw InvalidArgument("T > 0 required");
  if (ic.kind == InitialSpec::Kind::square && !(ic.half_width > 0.0)) {
    throw InvalidArgument("square half_width > 0 required");
  }
  if (ic.kind == InitialSpec::Kind::random) {
    if (!(ic.amplitude >= 0.0)) throw InvalidArgument("random amplitude >= 0 required");
    if (std::abs(ic.mean) + ic.amplitude > 1.0) throw InvalidArgument("|mean| + amplitude <= 1 required");
    if (!seed) throw InvalidArgument("seed required for random initial data");
  }
  if ((tag == ScenarioTag::spinodal || tag == ScenarioTag::coarsening) && !seed) {
    throw InvalidArgument("seed required for the " + to_string(tag) + " scenario");
  }
  if (tag == ScenarioTag::convergence) {
    if (levels.size() < 2) throw InvalidArgument("convergence needs at least two levels");
    if (!(dt_per_h > 0.0)) throw InvalidArgument("dt_per_h > 0 required");
  }
}

std::vector<std::string> Scenario::warnings() const {
  std::vector<std::string> out;
  // At least four cells across the interfacial layer of width sqrt(2) eps.
  const double h = std::hypot(mesh.domain.lx / static_cast<double>(mesh.nx),
                              mesh.domain.ly / static_cast<double>(mesh.ny));
  if (phys.epsilon < 4.0 * h / std::numbers::sqrt2) {
    out.push_back("interface under-resolved: eps = " + std::to_string(phys.epsilon) + " < 4h/sqrt(2) = " +
                  std::to_string(4.0 * h / std::numbers::sqrt2));
  }
  return out;
}

Scenario default_scenario(ScenarioTag tag) {
  Scenario s;
  s.tag = tag;
  s.phys = PhysParams{0.04, 100.0, 25.0, Mobility::constant(1.0)};
  s.scheme.dt = 0.005;
  s.scheme.picard_tol = 1e-10;
  s.scheme.newton_tol = 1e-10;
  switch (tag) {
    case ScenarioTag::convergence:
      s.T = 0.1;
      break;
    case ScenarioTag::energy_mass:
      s.T = 1.0;
      break;
    case ScenarioTag::relax_quiescent:
    case ScenarioTag::relax_shear:
      s.phys = PhysParams{0.02, tag == ScenarioTag::relax_shear ? 100.0 : 10.0, 200.0,
                          Mobility::regularized_degenerate(0.1)};
      s.T = 1.0;
      s.ic.kind = InitialSpec::Kind::square;
      if (tag == ScenarioTag::relax_shear) {
        s.ic.stokes_velocity = true;
        s.bc.kind = BoundarySpec::Kind::lid;
      }
      break;
    case ScenarioTag::spinodal:
      // gamma = 1/We* = 1.0 eps.
      s.phys = PhysParams{0.01, 10.0, 100.0, Mobility::regularized_degenerate(0.1)};
      s.T = 10.0;
      s.ic.kind = InitialSpec::Kind::random;
      break;
    case ScenarioTag::coarsening:
      s.phys = PhysParams{1.0, 1.0, 1.0, Mobility::constant(1.0)};
      s.mesh = MeshSpec{200, 200, Rectangle{100.0, 100.0}};
      s.scheme.dt = 0.5;
      s.T = 1000.0;
      s.ic.kind = InitialSpec::Kind::random;
      break;
  }
  return s;
}

double modes_phase(Point p) {
  return 0.24 * std::cos(2.0 * kPi * p.x) * std::cos(2.0 * kPi * p.y) +
         0.4 * std::cos(kPi * p.x) * std::cos(3.0 * kPi * p.y);
}

Vec2 modes_velocity(Point p) {
  const double sx = std::sin(kPi * p.x);
  const double sy = std::sin(kPi * p.y);
  return {-sx * sx * std::sin(2.0 * kPi * p.y), sy * sy * std::sin(2.0 * kPi * p.x)};
}

Field ic_square_shape(const FeSystem& fe, Point center, double half_width, double epsilon) {
  if (!(half_width > 0.0) || !(epsilon > 0.0)) throw InvalidArgument("half_width > 0 and epsilon > 0 required");
  const Point lo = fe.mesh().lower();
  const Point hi = fe.mesh().upper();
  if (center.x - half_width < lo.x || center.x + half_width > hi.x || center.y - half_width < lo.y ||
      center.y + half_width > hi.y) {
    throw OutsideDomain("square extends outside the domain");
  }
  const double width = std::numbers::sqrt2 * epsilon;
  return interpolate(fe, Space::scalar_p1, [=](Point p) {
    const double dx = std::abs(p.x - center.x) - half_width;
    const double dy = std::abs(p.y - center.y) - half_width;
    const double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
    const double inside = std::min(std::max(dx, dy), 0.0);
    return std::tanh(-(outside + inside) / width);
  });
}

Field ic_spinodal(const FeSystem& fe, double mean, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0) || std::abs(mean) + amplitude > 1.0) {
    throw InvalidArgument("|mean| + amplitude <= 1 and amplitude >= 0 required");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field out = zero_field(fe, Space::scalar_p1);
  for (Index i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] = mean + amplitude * dist(rng);
  return out;
}

Field ic_lid_driven_stokes(const FeSystem& fe, const std::function<double(double)>& g) {
  if (!g) throw InvalidArgument("lid profile required");
  const Point lo = fe.mesh().lower();
  const Point hi = fe.mesh().upper();
  if (std::abs(g(lo.x)) > 1e-12 || std::abs(g(hi.x)) > 1e-12) {
    throw InvalidArgument("lid profile must vanish at both top corners");
  }
  const Index nu = fe.n_velocity_dofs();
  const Index nv = fe.n_scalar_dofs();
  const SparseOperator k = block_diagonal2(assemble_p1b_stiffness(fe));
  const SparseOperator b = assemble_pressure_gradient(fe);
  SparseOperator a = compose_blocks(nu + nv, nu + nv, {{&k, 0, 0}, {&b, 0, nu}, {&b, nu, 0, 1.0, true}});
  std::vector<char> flag(static_cast<std::size_t>(nu + nv), 0);
  for (Index d : fe.dirichlet_velocity_dofs()) flag[static_cast<std::size_t>(d)] = 1;
  replace_rows_with_identity(a, flag);

  Vector rhs = Vector::Zero(nu + nv);
  const double top = hi.y - 1e-12 * (hi.y - lo.y);
  for (Index v : fe.dirichlet_block_dofs()) {
    const Point p = fe.mesh().vertices()[static_cast<std::size_t>(v)];
    if (p.y >= top) rhs[v] = g(p.x);
  }
  Vector border = Vector::Zero(nu + nv);
  border.tail(nv) = fe.scalar_basis_integrals();
  const Vector x = solve(LinearSystem{std::move(a), std::move(rhs), std::move(border)});
  return Field{Space::velocity_p1b, x.head(nu)};
}

VelocityBoundary boundary_for(const Scenario& s) {
  if (s.bc.kind == BoundarySpec::Kind::no_slip) return {};
  const double ly = s.mesh.domain.ly;
  const double lx = s.mesh.domain.lx;
  const double scale = s.bc.lid_scale;
  return VelocityBoundary{[=](Point p) {
    if (p.y >= ly * (1.0 - 1e-12)) return Vec2{scale * p.x * (lx - p.x), 0.0};
    return Vec2{};
  }};
}

std::shared_ptr<const FeSystem> build_fe(const MeshSpec& m) {
  return std::make_shared<const FeSystem>(std::make_shared<const Mesh>(build_uniform_mesh(m.nx, m.ny, m.domain)));
}

std::pair<Field, Field> initial_fields(const Scenario& s, const FeSystem& fe) {
  Field phi;
  switch (s.ic.kind) {
    case InitialSpec::Kind::modes:
      phi = interpolate(fe, Space::scalar_p1, modes_phase);
      break;
    case InitialSpec::Kind::square:
      phi = ic_square_shape(fe, s.ic.center, s.ic.half_width, s.phys.epsilon);
      break;
    case InitialSpec::Kind::random:
      if (!s.seed) throw InvalidArgument("seed required for random initial data");
      phi = ic_spinodal(fe, s.ic.mean, s.ic.amplitude, *s.seed);
      break;
    case InitialSpec::Kind::uniform:
      phi = Field{Space::scalar_p1, Vector::Constant(fe.n_scalar_dofs(), s.ic.value)};
      break;
  }
  Field u;
  if (s.ic.stokes_velocity) {
    const double lx = s.mesh.domain.lx;
    const double scale = s.bc.lid_scale;
    u = ic_lid_driven_stokes(fe, [=](double x) { return scale * x * (lx - x); });
  } else if (s.ic.kind == InitialSpec::Kind::modes) {
    u = interpolate_velocity(fe, modes_velocity);
  } else {
    u = zero_field(fe, Space::velocity_p1b);
  }
  return {std::move(phi), std::move(u)};
}

CauchySetup cauchy_setup(const Scenario& s) {
  CauchySetup c;
  c.phys = s.phys;
  c.scheme = s.scheme;
  c.domain = s.mesh.domain;
  c.T = s.T;
  c.dt_per_h = s.dt_per_h;
  switch (s.ic.kind) {
    case InitialSpec::Kind::modes:
      c.phi0 = modes_phase;
      c.u0 = modes_velocity;
      break;
    case InitialSpec::Kind::square: {
      const Point center = s.ic.center;
      const double hw = s.ic.half_width;
      const double width = std::numbers::sqrt2 * s.phys.epsilon;
      c.phi0 = [=](Point p) {
        const double dx = std::abs(p.x - center.x) - hw;
        const double dy = std::abs(p.y - center.y) - hw;
        const double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
        return std::tanh(-(outside + std::min(std::max(dx, dy), 0.0)) / width);
      };
      break;
    }
    case InitialSpec::Kind::uniform: {
      const double v = s.ic.value;
      c.phi0 = [v](Point) { return v; };
      break;
    }
    case InitialSpec::Kind::random:
      throw InvalidArgument("random initial data has no mesh-independent limit for a Cauchy study");
  }
  if (s.ic.stokes_velocity) throw InvalidArgument("Stokes initial velocity is not supported in a Cauchy study");
  if (s.bc.kind != BoundarySpec::Kind::no_slip) throw InvalidArgument("Cauchy study requires no-slip walls");
  if (s.ic.kind != InitialSpec::Kind::modes) c.u0 = nullptr;
  return c;
}

RunArtifacts run_scenario(const Scenario& s, const RunOptions& opts) {
  s.validate();
  RunArtifacts out;
  out.warnings = s.warnings();
  out.fe = build_fe(s.mesh);
  auto [phi0, u0] = initial_fields(s, *out.fe);
  Stepper stepper(out.fe, s.phys, s.scheme, boundary_for(s));
  const double dt = s.scheme.dt;
  out.initial = stepper.energy().compute(initial_state(*out.fe, phi0, u0), s.phys, dt);

  std::int64_t steps = step_count(s.T, dt);
  if (opts.max_steps > 0) steps = std::min(steps, opts.max_steps);
  auto record = [&](const AdvanceResult& r) {
    DiagnosticRow row;
    row.energy = stepper.energy().compute(r.state, s.phys, dt);
    row.picard_iters = r.report.picard_iters;
    row.newton_iters = r.report.newton_iters;
    out.rows.push_back(row);
    out.reports.push_back(r.report);
    if (opts.on_step) opts.on_step(r.state, r.report);
  };
  if (steps < 1) {
    out.final_state = initial_state(*out.fe, phi0, u0);
    return out;
  }
  AdvanceResult r = stepper.startup_first_order(phi0, u0);
  record(r);
  SimState state = std::move(r.state);
  while (state.k < steps) {
    AdvanceResult next = stepper.advance(state);
    record(next);
    state = std::move(next.state);
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace chns
