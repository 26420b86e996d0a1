#pragma once

#include <map>
#include <string>
#include <vector>

#include "chns/experiments.hpp"

namespace chns {

struct RunConfig {
  Scenario scenario;
  std::string output_dir = "chns_out";
  /// Write a field snapshot every this many steps (0: final state only).
  int snapshot_every = 0;
};

/// INI-style text: `key = value` lines, `[section]` headers, `#` or `;`
/// comments. The top-level key `scenario` is required and selects the
/// defaults; every other key overrides one of them.
///
///   scenario = energy_mass
///   [physics]     epsilon, Re, We_star, mobility (constant|degenerate), mobility_coeff
///   [scheme]      dt, picard_tol, picard_max, newton_tol, newton_max, projection,
///                 anderson_depth, freeze_velocity, newton_reuse_jacobian
///   [mesh]        nx, ny, lx, ly
///   [initial]     kind (modes|square|random|uniform), center_x, center_y,
///                 half_width, mean, amplitude, value, stokes_velocity
///   [boundary]    kind (no_slip|lid), lid_scale
///   [run]         T, seed, output, snapshot_every
///   [convergence] levels (comma separated), dt_per_h
///
/// Throws ConfigError carrying the line number for syntax errors, unknown
/// keys and malformed values, and InvalidArgument for violated invariants.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const RunConfig& c);

// VTK -----------------------------------------------------------------------

/// Legacy ASCII unstructured grid with point data phi, mu, p (scalars) and u
/// (vectors, vertex values). Numbers carry 17 significant digits.
void write_fields(const FeSystem& fe, const SimState& state, const std::string& path);

struct VtkData {
  std::vector<Point> points;
  std::vector<Triangle> cells;
  std::map<std::string, std::vector<double>> scalars;
  std::map<std::string, std::vector<Vec2>> vectors;
};
/// Reads files produced by write_fields.
VtkData read_vtk(const std::string& path);

// CSV -------------------------------------------------------------------------

inline constexpr const char* kDiagnosticsHeader = "t,kinetic,surface,E_ht,E_app,mass,picard_iters,newton_iters";

void write_diagnostics(const std::vector<DiagnosticRow>& rows, const std::string& path);
std::vector<DiagnosticRow> read_diagnostics(const std::string& path);

/// Per-step solver and identity diagnostics.
void write_step_reports(const std::vector<StepReport>& reports, const std::string& path);

void write_cauchy_table(const CauchyTable& table, const std::string& path);

/// 17 significant digits with trailing zeros dropped (%.17g), so the text
/// parses back to the same double; locale independent.
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace chns
