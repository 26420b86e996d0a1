#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>

#include "chns/assembly.hpp"
#include "chns/fespace.hpp"
#include "chns/linsolve.hpp"
#include "chns/params.hpp"

namespace chns {

class EnergyEvaluator;

/// Crank-Nicolson secant of the convex part f_v = phi^4/4:
/// (next^2 + prev^2)(next + prev)/4 = (f_v(next) - f_v(prev)) / (next - prev).
inline double convex_secant(double next, double prev) { return 0.25 * (next * next + prev * prev) * (next + prev); }

/// Two-level history required by the second-order scheme. mu_half holds the
/// chemical potential of the last completed step (zero before any step).
struct SimState {
  Field phi_k;
  Field phi_km1;
  Field u_k;
  Field u_km1;
  Field p_k;
  Field mu_half;
  std::int64_t k = 0;
  double t = 0.0;
};

/// Dirichlet data for the velocity. An empty function means no-slip.
struct VelocityBoundary {
  std::function<Vec2(Point)> value;
};

/// State at time index 0: phi_km1 = phi0, u_km1 = u0, p = 0, mu = 0.
SimState initial_state(const FeSystem& fe, const Field& phi0, const Field& u0);

struct HalfStep {
  Field phi_tilde;
  Field u_tilde;
};

struct NewtonResult {
  Field phi;
  Field mu;
  int iterations = 0;
  double residual = 0.0;  ///< final ||R||_2 / ||M 1||_2
};

struct PicardResult {
  Field phi;
  Field mu;
  Field u_half;  ///< u-bar^{k+1/2} (u-bar^{k+1} for the first-order startup)
  int iterations = 0;
  int newton_iterations = 0;
  double increment = 0.0;
};

struct ProjectionResult {
  Field u;
  Field p;
  Field u_bar;                       ///< intermediate velocity fed to the projection
  Field dp;                          ///< pressure increment
  double divergence_residual = 0.0;  ///< max_q |(div u, q)| over P1 basis functions
};

struct StepReport {
  std::int64_t step = 0;
  double t = 0.0;
  int picard_iters = 0;
  int newton_iters = 0;
  double picard_increment = 0.0;
  double mass_change = 0.0;
  double energy_before = 0.0;  ///< E_app at k
  double energy_after = 0.0;   ///< E_app at k+1
  double dissipation_mobility = 0.0;  ///< dt eps^-1/We* ||sqrt(M) grad mu||^2
  double dissipation_viscous = 0.0;   ///< dt/Re ||grad u-bar^{k+1/2}||^2
  double dissipation_phase = 0.0;     ///< eps^-1/(4 We*) ||phi^{k+1} - 2 phi^k + phi^{k-1}||^2
  /// E_app^{k+1} - E_app^k + total dissipation, with ||grad p||^2 in E_app.
  double identity_residual = 0.0;
  /// Same with the discrete gradient norm ||P_X grad p||^2.
  double identity_residual_discrete = 0.0;
  /// (theta^2/2)||grad dp||^2 - 1/2 ||u^{k+1} - u-bar^{k+1}||^2, theta = dt/2
  /// (dt for the startup step).
  double projection_defect = 0.0;
  double projection_defect_discrete = 0.0;
  double divergence_residual = 0.0;
};

struct AdvanceResult {
  SimState state;
  StepReport report;
};

/// One time step of the fully discrete scheme, with the constant operators of
/// a mesh and parameter set cached between steps.
class Stepper {
public:
  Stepper(std::shared_ptr<const FeSystem> fe, PhysParams phys, SchemeParams scheme, VelocityBoundary bc = {});
  ~Stepper();
  Stepper(Stepper&&) noexcept;

  const FeSystem& fe() const noexcept { return *fe_; }
  const std::shared_ptr<const FeSystem>& fe_ptr() const noexcept { return fe_; }
  const PhysParams& phys() const noexcept { return phys_; }
  const SchemeParams& scheme() const noexcept { return scheme_; }
  const EnergyEvaluator& energy() const;

  /// (3 g^k - g^{k-1}) / 2 for phi and u. Throws InvalidArgument at k = 0.
  HalfStep extrapolate_half(const SimState& s) const;

  /// Cahn-Hilliard pair (phi^{k+1}, mu^{k+1/2}) for a given u-bar.
  NewtonResult ch_newton_step(const SimState& s, const Field& u_bar, const Field& phi_tilde);

  /// Momentum solve for u-bar^{k+1/2}.
  Field ns_viscous_step(const SimState& s, const Field& mu, const Field& phi_tilde, const Field& u_tilde);

  /// Steps 1-3: alternates the two solves until the velocity settles.
  PicardResult picard_solve(const SimState& s);

  /// Step 4 realized as the coupled Darcy problem, u-bar^{k+1} = 2 u-bar^{k+1/2} - u^k.
  ProjectionResult projection_darcy(const Field& u_half, const SimState& s);
  /// Step 4 as a pressure Poisson equation followed by an L2 velocity update.
  ProjectionResult projection_poisson(const Field& u_half, const SimState& s);

  /// First-order coupled step from time 0 to dt; returns the state at k = 1.
  AdvanceResult startup_first_order(const Field& phi0, const Field& u0);

  /// Full second-order step. Requires k >= 1; errors carry the step index.
  AdvanceResult advance(const SimState& s);

  /// phi solving the chemical-potential equation for a given mu.
  Field phase_for_potential(const SimState& s, const Field& phi_tilde, const Field& mu);
  /// T(mu) = M(phi(mu) - phi^k) + dt K_M mu - dt G^T u-bar(mu), the reduced
  /// operator whose monotonicity gives unique solvability.
  Vector reduced_operator(const SimState& s, const Field& mu);

  // Cached constant operators.
  const SparseOperator& p1_mass() const noexcept { return m_; }
  const SparseOperator& p1_stiffness() const noexcept { return k_; }
  const SparseOperator& block_mass() const noexcept { return mb_; }
  const SparseOperator& block_stiffness() const noexcept { return kb_; }
  const SparseOperator& pressure_gradient() const noexcept { return b_; }
  /// Boundary values of the velocity (zero vector for no-slip).
  const Vector& boundary_velocity() const noexcept { return bc_values_; }

private:
  struct StepContext;
  enum class Order { first, second };

  void prepare(StepContext& ctx, const SimState& s, const Vector& phi_tilde, const Vector& u_conv, Order order,
               bool factor_velocity);
  NewtonResult newton(const StepContext& ctx, const Vector& u_bar, const Vector& phi_guess, const Vector& mu_guess);
  Vector momentum(const StepContext& ctx, const Vector& mu);
  PicardResult picard(const StepContext& ctx, const Vector& u_start, const Vector& mu_start);
  ProjectionResult project(const Vector& u_bar, const SimState& s, double theta, Projection kind);
  SparseLu& darcy_lu(double theta);
  StepReport report_for(const SimState& before, const SimState& after, const StepContext& ctx,
                        const PicardResult& pic, const ProjectionResult& proj);
  void apply_velocity_dirichlet(Vector& rhs_block, int component) const;

  std::shared_ptr<const FeSystem> fe_;
  PhysParams phys_;
  SchemeParams scheme_;
  Vector bc_values_;
  std::vector<char> dirichlet_block_row_;

  SparseOperator m_, k_, mb_, kb_, b_;
  std::array<SparseOperator, 2> b_blocks_;
  SparseOperator k_mobility_constant_;
  BlockComposer jacobian_layout_;
  SparseLu jacobian_lu_;
  SparseLu velocity_lu_;
  SparseLu phase_lu_;
  struct DarcyCache;
  std::unique_ptr<DarcyCache> darcy_;
  std::optional<SparseLu> poisson_lu_;
  std::optional<SparseLu> dirichlet_mass_lu_;
  std::unique_ptr<EnergyEvaluator> energy_;
  double unit_mass_norm_ = 1.0;
};

}  // namespace chns
