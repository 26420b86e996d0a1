#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chns/cli_io.hpp"
#include "chns/diagnostics.hpp"
#include "chns/error.hpp"
#include "chns/experiments.hpp"

namespace py = pybind11;
using namespace chns;

namespace {

std::shared_ptr<const FeSystem> unit_square_system(Index n, double lx, double ly) {
  return build_fe(MeshSpec{n, n, Rectangle{lx, ly}});
}

}  // namespace

PYBIND11_MODULE(chns, m) {
  m.doc() = "Second-order Cahn-Hilliard-Navier-Stokes solver with P1 / P1-bubble finite elements";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<OutsideDomain>(m, "OutsideDomain", PyExc_ValueError);
  py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.attr("solver_backend") = direct_solver_backend();

  py::class_<Point>(m, "Point")
      .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
      .def_readwrite("x", &Point::x)
      .def_readwrite("y", &Point::y);

  py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
      .def_property_readonly("n_vertices", &Mesh::n_vertices)
      .def_property_readonly("n_triangles", &Mesh::n_triangles)
      .def_property_readonly("h", &Mesh::h)
      .def_property_readonly("area", &Mesh::area)
      .def("vertices",
           [](const Mesh& mesh) {
             Eigen::MatrixX2d out(mesh.n_vertices(), 2);
             for (Index i = 0; i < mesh.n_vertices(); ++i) {
               out(i, 0) = mesh.vertices()[static_cast<std::size_t>(i)].x;
               out(i, 1) = mesh.vertices()[static_cast<std::size_t>(i)].y;
             }
             return out;
           })
      .def("triangles", [](const Mesh& mesh) {
        Eigen::Matrix<Index, Eigen::Dynamic, 3, Eigen::RowMajor> out(mesh.n_triangles(), 3);
        for (Index t = 0; t < mesh.n_triangles(); ++t) {
          for (int i = 0; i < 3; ++i) out(t, i) = mesh.triangles()[static_cast<std::size_t>(t)][i];
        }
        return out;
      });

  py::enum_<Space>(m, "Space")
      .value("scalar_p1", Space::scalar_p1)
      .value("velocity_p1b", Space::velocity_p1b)
      .value("pressure_p1_meanzero", Space::pressure_p1_meanzero);

  py::class_<Field>(m, "Field")
      .def(py::init([](Space s, Vector c) { return Field{s, std::move(c)}; }), py::arg("space"), py::arg("coeffs"))
      .def_readwrite("space", &Field::space)
      .def_readwrite("coeffs", &Field::coeffs);

  py::class_<FeSystem, std::shared_ptr<FeSystem>>(m, "FeSystem")
      .def_property_readonly("mesh", [](const FeSystem& fe) { return std::const_pointer_cast<Mesh>(fe.mesh_ptr()); })
      .def_property_readonly("n_scalar_dofs", &FeSystem::n_scalar_dofs)
      .def_property_readonly("n_velocity_dofs", &FeSystem::n_velocity_dofs)
      .def("interpolate", [](const FeSystem& fe, Space s, const std::function<double(double, double)>& g) {
        return interpolate(fe, s, [&](Point p) { return g(p.x, p.y); });
      })
      .def("integrate", [](const FeSystem& fe, const Field& f) { return integrate(fe, f); })
      .def("eval_scalar", [](const FeSystem& fe, const Field& f, double x, double y) {
        return eval_scalar(fe, f, Point{x, y});
      });

  m.def(
      "unit_square",
      [](Index n, double lx, double ly) { return std::const_pointer_cast<FeSystem>(unit_square_system(n, lx, ly)); },
      py::arg("n"), py::arg("lx") = 1.0, py::arg("ly") = 1.0,
      "Finite-element system on an n x n uniform triangulation of [0,lx] x [0,ly].");

  py::class_<Mobility>(m, "Mobility")
      .def_static("constant", &Mobility::constant)
      .def_static("regularized_degenerate", &Mobility::regularized_degenerate)
      .def_readwrite("coeff", &Mobility::coeff)
      .def("__call__", &Mobility::operator(), py::arg("phi"), py::arg("epsilon"));

  py::class_<PhysParams>(m, "PhysParams")
      .def(py::init<>())
      .def_readwrite("epsilon", &PhysParams::epsilon)
      .def_readwrite("Re", &PhysParams::Re)
      .def_readwrite("We_star", &PhysParams::We_star)
      .def_readwrite("mobility", &PhysParams::mobility)
      .def("validate", &PhysParams::validate);

  py::enum_<Projection>(m, "Projection")
      .value("darcy_coupled", Projection::darcy_coupled)
      .value("pressure_poisson", Projection::pressure_poisson);

  py::class_<SchemeParams>(m, "SchemeParams")
      .def(py::init<>())
      .def_readwrite("dt", &SchemeParams::dt)
      .def_readwrite("picard_tol", &SchemeParams::picard_tol)
      .def_readwrite("picard_max", &SchemeParams::picard_max)
      .def_readwrite("newton_tol", &SchemeParams::newton_tol)
      .def_readwrite("newton_max", &SchemeParams::newton_max)
      .def_readwrite("projection", &SchemeParams::projection)
      .def_readwrite("anderson_depth", &SchemeParams::anderson_depth)
      .def_readwrite("freeze_velocity", &SchemeParams::freeze_velocity)
      .def_readwrite("newton_reuse_jacobian", &SchemeParams::newton_reuse_jacobian)
      .def("validate", &SchemeParams::validate);

  py::class_<SimState>(m, "SimState")
      .def_readwrite("phi", &SimState::phi_k)
      .def_readwrite("phi_prev", &SimState::phi_km1)
      .def_readwrite("u", &SimState::u_k)
      .def_readwrite("u_prev", &SimState::u_km1)
      .def_readwrite("p", &SimState::p_k)
      .def_readwrite("mu", &SimState::mu_half)
      .def_readwrite("k", &SimState::k)
      .def_readwrite("t", &SimState::t);

  py::class_<StepReport>(m, "StepReport")
      .def_readonly("step", &StepReport::step)
      .def_readonly("t", &StepReport::t)
      .def_readonly("picard_iters", &StepReport::picard_iters)
      .def_readonly("newton_iters", &StepReport::newton_iters)
      .def_readonly("mass_change", &StepReport::mass_change)
      .def_readonly("energy_before", &StepReport::energy_before)
      .def_readonly("energy_after", &StepReport::energy_after)
      .def_readonly("identity_residual", &StepReport::identity_residual)
      .def_readonly("identity_residual_discrete", &StepReport::identity_residual_discrete)
      .def_readonly("projection_defect", &StepReport::projection_defect)
      .def_readonly("projection_defect_discrete", &StepReport::projection_defect_discrete)
      .def_readonly("divergence_residual", &StepReport::divergence_residual);

  py::class_<EnergyRecord>(m, "EnergyRecord")
      .def_readonly("t", &EnergyRecord::t)
      .def_readonly("kinetic", &EnergyRecord::kinetic)
      .def_readonly("surface", &EnergyRecord::surface)
      .def_readonly("E_ht", &EnergyRecord::E_ht)
      .def_readonly("E_app", &EnergyRecord::E_app)
      .def_readonly("mass", &EnergyRecord::mass);

  py::class_<Stepper>(m, "Stepper")
      .def(py::init([](std::shared_ptr<FeSystem> fe, PhysParams phys, SchemeParams scheme) {
             return Stepper(fe, phys, scheme);
           }),
           py::arg("fe"), py::arg("phys"), py::arg("scheme"))
      .def(
          "startup",
          [](Stepper& s, const Field& phi0, const Field& u0) {
            AdvanceResult r = s.startup_first_order(phi0, u0);
            return py::make_tuple(std::move(r.state), r.report);
          },
          py::arg("phi0"), py::arg("u0"), "First-order step from t = 0; returns (state, report).")
      .def(
          "advance",
          [](Stepper& s, const SimState& st) {
            AdvanceResult r = s.advance(st);
            return py::make_tuple(std::move(r.state), r.report);
          },
          py::arg("state"), "Second-order step; returns (state, report).")
      .def("reduced_operator", &Stepper::reduced_operator)
      .def("energies", [](const Stepper& s, const SimState& st) {
        return s.energy().compute(st, s.phys(), s.scheme().dt);
      });

  m.def("initial_state", &initial_state);
  m.def("zero_field", &zero_field);
  m.def("interpolate_velocity", [](const FeSystem& fe, const std::function<std::pair<double, double>(double, double)>& g) {
    return interpolate_velocity(fe, [&](Point p) {
      const auto [a, b] = g(p.x, p.y);
      return Vec2{a, b};
    });
  });

  m.def("fit_coarsening_rate",
        [](const std::vector<double>& t, const std::vector<double>& e, std::optional<std::pair<double, double>> w) {
          std::optional<TimeWindow> win;
          if (w) win = TimeWindow{w->first, w->second};
          return fit_coarsening_rate(t, e, win);
        },
        py::arg("t"), py::arg("energy"), py::arg("window") = py::none());
  m.def("isoperimetric_ratio", [](const FeSystem& fe, const Field& phi) {
    return zero_contour(fe, phi).isoperimetric_ratio();
  });
  m.def("ic_square_shape", [](const FeSystem& fe, double cx, double cy, double hw, double eps) {
    return ic_square_shape(fe, Point{cx, cy}, hw, eps);
  });
  m.def("ic_spinodal", &ic_spinodal, py::arg("fe"), py::arg("mean"), py::arg("amplitude"), py::arg("seed"));
  m.def("skew_form", [](const FeSystem& fe, const Field& w, const Vector& v) {
    return v.dot(assemble_convection(fe, w) * v);
  });

  py::class_<DiagnosticRow>(m, "DiagnosticRow")
      .def_readonly("energy", &DiagnosticRow::energy)
      .def_readonly("picard_iters", &DiagnosticRow::picard_iters)
      .def_readonly("newton_iters", &DiagnosticRow::newton_iters);

  py::class_<RunConfig>(m, "RunConfig")
      .def_property_readonly("scenario", [](const RunConfig& c) { return to_string(c.scenario.tag); })
      .def_property_readonly("phys", [](const RunConfig& c) { return c.scenario.phys; })
      .def_property_readonly("scheme", [](const RunConfig& c) { return c.scenario.scheme; })
      .def_property_readonly("mesh_n", [](const RunConfig& c) { return c.scenario.mesh.nx; })
      .def_property_readonly("T", [](const RunConfig& c) { return c.scenario.T; })
      .def("format", &format_config);
  m.def("parse_config", &parse_config);
  m.def(
      "run_config",
      [](const RunConfig& c, std::int64_t max_steps) {
        RunOptions opts;
        opts.max_steps = max_steps;
        RunArtifacts a = run_scenario(c.scenario, opts);
        return py::make_tuple(a.rows, std::move(a.final_state));
      },
      py::arg("config"), py::arg("max_steps") = 0, "Runs the configured scenario; returns (rows, final_state).");
  m.def("write_diagnostics", &write_diagnostics);
  m.def("read_diagnostics", &read_diagnostics);
  m.def("write_fields", &write_fields);
  m.def("read_vtk_scalars", [](const std::string& path) { return read_vtk(path).scalars; });
}
