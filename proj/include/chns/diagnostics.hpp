#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chns/energy.hpp"
#include "chns/stepper.hpp"

namespace chns {

// ---------------------------------------------------------------------------
// Cauchy convergence

/// Refinement study on [0,lx] x [0,ly] with 2^n cells per side at level n and
/// dt = dt_per_h * h, h the cell width. The step count is T / dt, which must
/// be an integer at every level.
struct CauchySetup {
  PhysParams phys;
  SchemeParams scheme;
  Rectangle domain;
  double T = 0.1;
  double dt_per_h = 0.1;
  std::function<double(Point)> phi0;
  std::function<Vec2(Point)> u0;  ///< empty means zero
};

/// Fields at the final time of one refinement level.
struct LevelSolution {
  Index n = 0;  ///< level exponent
  std::shared_ptr<const FeSystem> fe;
  SimState state;
};

struct CauchyRow {
  std::string variable;  ///< "phi", "u", "v" or "p"
  Index coarse = 0;      ///< level exponent of the coarser run
  Index fine = 0;
  double error = 0.0;  ///< L2 norm of fine - coarse on the fine mesh
  double rate = 0.0;   ///< log2(previous error / error); NaN for the first pair
};

struct CauchyTable {
  std::vector<CauchyRow> rows;
  /// Non-fatal observations, e.g. an error that grew under refinement.
  std::vector<std::string> warnings;

  /// Rates of one variable in level order (first pair omitted).
  std::vector<double> rates(const std::string& variable) const;
};

/// Runs startup plus second-order steps to T on one level.
LevelSolution solve_level(const CauchySetup& setup, Index n);

/// L2 differences of consecutive solutions, coarse fields evaluated exactly
/// (bubbles included) at the quadrature points of the finer mesh.
CauchyTable cauchy_table(const std::vector<LevelSolution>& levels);

/// solve_level for each exponent followed by cauchy_table.
CauchyTable cauchy_convergence(const CauchySetup& setup, const std::vector<Index>& levels);

/// ||a - b||_{L2} of two fields of the same space living on different meshes;
/// integrated with a degree-6 rule on fe_a, b located pointwise.
double l2_difference(const FeSystem& fe_a, const Field& a, const FeSystem& fe_b, const Field& b, int component = -1);

// ---------------------------------------------------------------------------
// Coarsening

struct TimeWindow {
  double begin;
  double end;
};

/// Least-squares slope of log E against log t over the window, which defaults
/// to the last decade [t_max / 10, t_max]. Throws InvalidArgument when fewer
/// than two samples fall in the window or a sample there is not positive.
double fit_coarsening_rate(const std::vector<double>& t, const std::vector<double>& energy,
                           std::optional<TimeWindow> window = std::nullopt);

// ---------------------------------------------------------------------------
// Monotonicity of the reduced operator

struct MonotonicityTrial {
  double pairing = 0.0;  ///< (mu - nu)^T (T(mu) - T(nu))
  double h1_sq = 0.0;    ///< ||mu - nu||_{H1}^2
};

struct MonotonicityReport {
  std::vector<MonotonicityTrial> trials;
  double min_pairing = 0.0;
  /// min over trials of pairing / h1_sq.
  double min_scaled = 0.0;
};

/// Random nodal coefficients i.i.d. uniform in [-1, 1] (mt19937_64).
Vector random_coefficients(Index n, std::uint64_t seed);

/// Pairing <T(mu) - T(nu), mu - nu> for one pair.
double monotonicity_pairing(Stepper& stepper, const SimState& frozen, const Field& mu, const Field& nu);

/// Seeded trials; trial i uses (mu, nu) drawn from seeds derived from `seed`.
MonotonicityReport monotonicity_probe(Stepper& stepper, const SimState& frozen, int n_trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Shape and series measures

struct ContourMeasure {
  double area = 0.0;       ///< |{phi > 0}|
  double perimeter = 0.0;  ///< length of the phi = 0 level set
  /// 4 pi A / P^2; 1 for a disc. Zero when there is no contour.
  double isoperimetric_ratio() const;
};

/// Exact for the piecewise-linear interpolant (marching triangles).
ContourMeasure zero_contour(const FeSystem& fe, const Field& phi);

/// Largest E_app increase between consecutive records (<= 0 when monotone).
double max_energy_increase(const std::vector<EnergyRecord>& series);
/// max_k |mass_k - mass_0|.
double max_mass_drift(const std::vector<EnergyRecord>& series);

}  // namespace chns
