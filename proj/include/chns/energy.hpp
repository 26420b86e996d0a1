#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>

#include "chns/fespace.hpp"
#include "chns/linsolve.hpp"
#include "chns/params.hpp"

namespace chns {

struct SimState;

/// Energies of one discrete state.
struct EnergyRecord {
  double t = 0.0;
  double kinetic = 0.0;  ///< 1/2 ||u||^2
  double surface = 0.0;  ///< 1/We* integral (eps^-1 f0(phi) + eps/2 |grad phi|^2)
  double E_ht = 0.0;     ///< kinetic + surface
  double E_app = 0.0;    ///< E_ht + eps^-1/(4 We*)||phi^k - phi^{k-1}||^2 + dt^2/8 ||grad p^k||^2
  double mass = 0.0;     ///< integral phi
  /// E_app with the discrete gradient norm ||P_X grad p||^2 in place of ||grad p||^2.
  double E_app_discrete = 0.0;
};

/// f0(phi) = (1 - phi^2)^2 / 4.
inline double double_well(double phi) {
  const double a = 1.0 - phi * phi;
  return 0.25 * a * a;
}

/// Evaluates energy functionals with exact quadrature; caches the matrices.
class EnergyEvaluator {
public:
  explicit EnergyEvaluator(std::shared_ptr<const FeSystem> fe);
  ~EnergyEvaluator();

  double kinetic(const Field& u) const;
  /// integral f0(phi), exact for P1 phi.
  double bulk(const Field& phi) const;
  double surface(const Field& phi, const PhysParams& phys) const;
  /// ||phi||^2 weighted by the P1 mass matrix.
  double l2_sq(const Vector& phi) const;
  double pressure_gradient_sq(const Field& p) const;
  /// sup over v in X_h of (grad p, v)^2 / ||v||^2.
  double discrete_pressure_gradient_sq(const Field& p) const;

  EnergyRecord compute(const SimState& s, const PhysParams& phys, double dt) const;

private:
  std::shared_ptr<const FeSystem> fe_;
  SparseOperator m_, k_, mb_;
  std::array<SparseOperator, 2> b_;
  mutable std::once_flag mass_once_;
  mutable std::optional<SparseLu> interior_mass_lu_;
};

/// One-off evaluation for a state.
EnergyRecord compute_energies(const FeSystem& fe, const SimState& s, const PhysParams& phys, double dt);

}  // namespace chns
