#include "chns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "chns/error.hpp"

namespace chns {

namespace {

double component_at(const FeSystem& fe, const Field& f, Index t, const std::array<double, 3>& l, int component) {
  if (f.space != Space::velocity_p1b) return eval_scalar_at(fe, f.coeffs, t, l);
  const Vec2 v = eval_velocity_at(fe, f.coeffs, t, l);
  return component == 0 ? v.x : v.y;
}

}  // namespace

std::vector<double> CauchyTable::rates(const std::string& variable) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.variable == variable && !std::isnan(r.rate)) out.push_back(r.rate);
  }
  return out;
}

LevelSolution solve_level(const CauchySetup& setup, Index n) {
  if (n < 0 || n > 12) throw InvalidArgument("level exponent must lie in [0, 12]");
  if (!setup.phi0) throw InvalidArgument("Cauchy setup needs an initial phase field");
  const Index cells = Index{1} << n;
  const double h = setup.domain.lx / static_cast<double>(cells);
  SchemeParams scheme = setup.scheme;
  scheme.dt = setup.dt_per_h * h;
  const double steps_real = setup.T / scheme.dt;
  const auto steps = static_cast<std::int64_t>(std::llround(steps_real));
  if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * steps_real) {
    throw InvalidArgument("T / dt must be a positive integer at level " + std::to_string(n));
  }

  LevelSolution out;
  out.n = n;
  out.fe = std::make_shared<const FeSystem>(
      std::make_shared<const Mesh>(build_uniform_mesh(cells, cells, setup.domain)));
  Stepper stepper(out.fe, setup.phys, scheme);
  const Field phi0 = interpolate(*out.fe, Space::scalar_p1, setup.phi0);
  const Field u0 = setup.u0 ? interpolate_velocity(*out.fe, setup.u0) : zero_field(*out.fe, Space::velocity_p1b);
  SimState s = stepper.startup_first_order(phi0, u0).state;
  while (s.k < steps) s = stepper.advance(s).state;
  out.state = std::move(s);
  return out;
}

double l2_difference(const FeSystem& fe_a, const Field& a, const FeSystem& fe_b, const Field& b, int component) {
  check_field(fe_a, a, a.space);
  check_field(fe_b, b, a.space);
  const QuadratureRule& rule = triangle_rule(6);
  const auto& verts = fe_a.mesh().vertices();
  double sum = 0.0;
  for (Index t = 0; t < fe_a.mesh().n_triangles(); ++t) {
    const auto& tri = fe_a.mesh().triangles()[static_cast<std::size_t>(t)];
    const double area = fe_a.geometry(t).area;
    for (const auto& q : rule) {
      Point x;
      for (int i = 0; i < 3; ++i) {
        x.x += q.bary[i] * verts[static_cast<std::size_t>(tri[i])].x;
        x.y += q.bary[i] * verts[static_cast<std::size_t>(tri[i])].y;
      }
      const auto tb = fe_b.mesh().locate(x);
      if (!tb) throw OutsideDomain("quadrature point outside the second mesh");
      const double d = component_at(fe_a, a, t, q.bary, component) -
                       component_at(fe_b, b, *tb, fe_b.mesh().barycentric(*tb, x), component);
      sum += area * q.weight * d * d;
    }
  }
  return std::sqrt(sum);
}

CauchyTable cauchy_table(const std::vector<LevelSolution>& levels) {
  CauchyTable table;
  struct Var {
    const char* name;
    Field SimState::*field;
    int component;
  };
  const Var vars[] = {{"phi", &SimState::phi_k, -1},
                      {"u", &SimState::u_k, 0},
                      {"v", &SimState::u_k, 1},
                      {"p", &SimState::p_k, -1}};
  for (const Var& var : vars) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      const LevelSolution& coarse = levels[i];
      const LevelSolution& fine = levels[i + 1];
      CauchyRow row;
      row.variable = var.name;
      row.coarse = coarse.n;
      row.fine = fine.n;
      row.error = l2_difference(*fine.fe, fine.state.*var.field, *coarse.fe, coarse.state.*var.field, var.component);
      row.rate = std::numeric_limits<double>::quiet_NaN();
      if (i > 0 && prev > 0.0 && row.error > 0.0) row.rate = std::log2(prev / row.error);
      if (i > 0 && row.error > prev) {
        table.warnings.push_back(std::string("nonmonotone error for ") + var.name + " at levels " +
                                 std::to_string(coarse.n) + "-" + std::to_string(fine.n));
      }
      prev = row.error;
      table.rows.push_back(row);
    }
  }
  return table;
}

CauchyTable cauchy_convergence(const CauchySetup& setup, const std::vector<Index>& levels) {
  if (levels.size() < 2) throw InvalidArgument("Cauchy convergence needs at least two levels");
  std::vector<LevelSolution> sols;
  sols.reserve(levels.size());
  for (Index n : levels) sols.push_back(solve_level(setup, n));
  return cauchy_table(sols);
}

double fit_coarsening_rate(const std::vector<double>& t, const std::vector<double>& energy,
                           std::optional<TimeWindow> window) {
  if (t.size() != energy.size()) throw InvalidArgument("time and energy series differ in length");
  if (t.empty()) throw InvalidArgument("empty window: the series has no samples");
  if (!window) {
    const double t_max = *std::max_element(t.begin(), t.end());
    window = TimeWindow{t_max / 10.0, t_max};
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window->begin || t[i] > window->end) continue;
    if (!(t[i] > 0.0) || !(energy[i] > 0.0)) {
      throw InvalidArgument("coarsening fit needs positive t and energy inside the window");
    }
    const double x = std::log(t[i]);
    const double y = std::log(energy[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw InvalidArgument("empty window: fewer than two samples in the fit window");
  const double n = static_cast<double>(count);
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw InvalidArgument("fit window holds a single distinct time");
  return (n * sxy - sx * sy) / den;
}

Vector random_coefficients(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = dist(rng);
  return out;
}

double monotonicity_pairing(Stepper& stepper, const SimState& frozen, const Field& mu, const Field& nu) {
  const Vector d = mu.coeffs - nu.coeffs;
  if (d.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  return d.dot(stepper.reduced_operator(frozen, mu) - stepper.reduced_operator(frozen, nu));
}

MonotonicityReport monotonicity_probe(Stepper& stepper, const SimState& frozen, int n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw InvalidArgument("n_trials >= 1 required");
  const Index n = stepper.fe().n_scalar_dofs();
  MonotonicityReport report;
  report.min_pairing = std::numeric_limits<double>::infinity();
  report.min_scaled = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_trials; ++i) {
    const auto base = seed + 2 * static_cast<std::uint64_t>(i);
    const Field mu{Space::scalar_p1, random_coefficients(n, base)};
    const Field nu{Space::scalar_p1, random_coefficients(n, base + 1)};
    MonotonicityTrial trial;
    trial.pairing = monotonicity_pairing(stepper, frozen, mu, nu);
    const Vector d = mu.coeffs - nu.coeffs;
    trial.h1_sq = d.dot(stepper.p1_mass() * d) + d.dot(stepper.p1_stiffness() * d);
    report.min_pairing = std::min(report.min_pairing, trial.pairing);
    report.min_scaled = std::min(report.min_scaled, trial.pairing / trial.h1_sq);
    report.trials.push_back(trial);
  }
  return report;
}

double ContourMeasure::isoperimetric_ratio() const {
  if (!(perimeter > 0.0)) return 0.0;
  return 4.0 * std::numbers::pi * area / (perimeter * perimeter);
}

ContourMeasure zero_contour(const FeSystem& fe, const Field& phi) {
  check_field(fe, phi, Space::scalar_p1);
  const auto& verts = fe.mesh().vertices();
  ContourMeasure out;
  for (Index t = 0; t < fe.mesh().n_triangles(); ++t) {
    const auto& tri = fe.mesh().triangles()[static_cast<std::size_t>(t)];
    const double area = fe.geometry(t).area;
    std::array<double, 3> v;
    std::array<Point, 3> x;
    int positive = 0;
    for (int i = 0; i < 3; ++i) {
      v[i] = phi.coeffs[tri[i]];
      x[i] = verts[static_cast<std::size_t>(tri[i])];
      if (v[i] > 0.0) ++positive;
    }
    if (positive == 3) {
      out.area += area;
      continue;
    }
    if (positive == 0) continue;
    // The lone vertex is the one whose sign differs from the other two.
    const bool lone_positive = positive == 1;
    int lone = 0;
    for (int i = 0; i < 3; ++i) {
      if ((v[i] > 0.0) == lone_positive) lone = i;
    }
    const int a = (lone + 1) % 3;
    const int b = (lone + 2) % 3;
    const double sa = v[lone] / (v[lone] - v[a]);
    const double sb = v[lone] / (v[lone] - v[b]);
    const Point pa{x[lone].x + sa * (x[a].x - x[lone].x), x[lone].y + sa * (x[a].y - x[lone].y)};
    const Point pb{x[lone].x + sb * (x[b].x - x[lone].x), x[lone].y + sb * (x[b].y - x[lone].y)};
    out.perimeter += std::hypot(pa.x - pb.x, pa.y - pb.y);
    const double corner = area * sa * sb;
    out.area += lone_positive ? corner : area - corner;
  }
  return out;
}

double max_energy_increase(const std::vector<EnergyRecord>& series) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < series.size(); ++i) worst = std::max(worst, series[i].E_app - series[i - 1].E_app);
  return series.size() < 2 ? 0.0 : worst;
}

double max_mass_drift(const std::vector<EnergyRecord>& series) {
  double worst = 0.0;
  for (const auto& r : series) worst = std::max(worst, std::abs(r.mass - series.front().mass));
  return worst;
}

}  // namespace chns
