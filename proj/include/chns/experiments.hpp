#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chns/diagnostics.hpp"
#include "chns/stepper.hpp"

namespace chns {

enum class ScenarioTag { convergence, energy_mass, relax_quiescent, relax_shear, spinodal, coarsening };

std::string to_string(ScenarioTag tag);
/// Accepts the snake_case names printed by to_string.
ScenarioTag parse_scenario_tag(const std::string& s);

struct MeshSpec {
  Index nx = 128;
  Index ny = 128;
  Rectangle domain;
};

struct InitialSpec {
  enum class Kind { modes, square, random, uniform };
  Kind kind = Kind::modes;
  // square
  Point center{0.5, 0.5};
  double half_width = 0.2;
  // random
  double mean = -0.05;
  double amplitude = 0.05;
  // uniform
  double value = 0.0;
  /// Start from the Stokes lid-driven cavity flow instead of the default
  /// velocity (the modes field for Kind::modes, rest otherwise).
  bool stokes_velocity = false;
};

struct BoundarySpec {
  enum class Kind { no_slip, lid };
  Kind kind = Kind::no_slip;
  /// Lid speed factor: u = (scale x (lx - x), 0) on the top side.
  double lid_scale = 1.0;
};

struct Scenario {
  ScenarioTag tag = ScenarioTag::energy_mass;
  PhysParams phys;
  SchemeParams scheme;
  MeshSpec mesh;
  double T = 1.0;
  InitialSpec ic;
  BoundarySpec bc;
  std::optional<std::uint64_t> seed;
  // Refinement study (convergence scenario).
  std::vector<Index> levels{4, 5, 6, 7};
  double dt_per_h = 0.1;

  /// Throws InvalidArgument naming the violated condition.
  void validate() const;
  /// Non-fatal notes, e.g. fewer than four cells across the interface.
  std::vector<std::string> warnings() const;
};

/// Parameters of the corresponding published experiment, desk-scaled where
/// the original used adaptive meshes.
Scenario default_scenario(ScenarioTag tag);

// Initial data ---------------------------------------------------------------

/// 0.24 cos(2 pi x) cos(2 pi y) + 0.4 cos(pi x) cos(3 pi y).
double modes_phase(Point p);
/// (-sin^2(pi x) sin(2 pi y), sin^2(pi y) sin(2 pi x)).
Vec2 modes_velocity(Point p);

/// tanh(d / (sqrt(2) eps)) with d the signed distance to the square boundary,
/// positive inside. Throws OutsideDomain if the square leaves the mesh box.
Field ic_square_shape(const FeSystem& fe, Point center, double half_width, double epsilon);

/// Vertex values mean + U(-amplitude, amplitude) from mt19937_64(seed).
Field ic_spinodal(const FeSystem& fe, double mean, double amplitude, std::uint64_t seed);

/// Stationary Stokes flow with u = (g(x), 0) on the top side and zero on the
/// rest of the boundary.
Field ic_lid_driven_stokes(const FeSystem& fe, const std::function<double(double)>& g);

VelocityBoundary boundary_for(const Scenario& s);

// Runs -------------------------------------------------------------------------

/// One CSV row: energies after a step plus its solver counts.
struct DiagnosticRow {
  EnergyRecord energy;
  int picard_iters = 0;
  int newton_iters = 0;
};

struct RunOptions {
  /// Called after every step with the new state.
  std::function<void(const SimState&, const StepReport&)> on_step;
  /// Stop after this many steps (0: run to T).
  std::int64_t max_steps = 0;
};

struct RunArtifacts {
  std::shared_ptr<const FeSystem> fe;
  EnergyRecord initial;
  std::vector<DiagnosticRow> rows;
  std::vector<StepReport> reports;
  SimState final_state;
  std::vector<std::string> warnings;
};

std::shared_ptr<const FeSystem> build_fe(const MeshSpec& m);
/// Initial (phi0, u0) of a scenario on the given system.
std::pair<Field, Field> initial_fields(const Scenario& s, const FeSystem& fe);
/// Cauchy study with the scenario's physics, data and refinement knobs.
CauchySetup cauchy_setup(const Scenario& s);

/// startup_first_order once, then advance until t reaches T. Deterministic
/// per scenario and seed.
RunArtifacts run_scenario(const Scenario& s, const RunOptions& opts = {});

}  // namespace chns
