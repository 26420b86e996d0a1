#include "chns/stepper.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "chns/energy.hpp"
#include "chns/error.hpp"

namespace chns {

namespace {

Vector stack(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

[[noreturn]] void rethrow_with_step(std::int64_t step, double t) {
  const std::string where = "step " + std::to_string(step) + " (t = " + std::to_string(t) + "): ";
  try {
    throw;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(where + e.what(), e.last_increment());
  } catch (const SolveError& e) {
    throw SolveError(where + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(where + e.what());
  } catch (const Error& e) {
    throw Error(where + e.what());
  }
}

}  // namespace

SimState initial_state(const FeSystem& fe, const Field& phi0, const Field& u0) {
  check_field(fe, phi0, Space::scalar_p1);
  check_field(fe, u0, Space::velocity_p1b);
  SimState s;
  s.phi_k = Field{Space::scalar_p1, phi0.coeffs};
  s.phi_km1 = s.phi_k;
  s.u_k = u0;
  s.u_km1 = u0;
  s.p_k = zero_field(fe, Space::pressure_p1_meanzero);
  s.mu_half = zero_field(fe, Space::scalar_p1);
  return s;
}

struct Stepper::StepContext {
  Order order = Order::second;
  const SimState* s = nullptr;
  Vector phi_tilde;     // coefficient field for mobility and coupling
  Vector phi_explicit;  // explicit concave part
  double alpha = 2.0;
  SparseOperator k_mob;
  std::array<SparseOperator, 2> g;
  bool velocity_ready = false;
  mutable bool jacobian_ready = false;
};

struct Stepper::DarcyCache {
  std::vector<std::pair<double, SparseLu>> by_theta;
};

Stepper::Stepper(std::shared_ptr<const FeSystem> fe, PhysParams phys, SchemeParams scheme, VelocityBoundary bc)
    : fe_(std::move(fe)), phys_(phys), scheme_(scheme), darcy_(std::make_unique<DarcyCache>()) {
  if (!fe_) throw InvalidArgument("Stepper needs a finite-element system");
  phys_.validate();
  scheme_.validate();
  const Index nv = fe_->n_scalar_dofs();
  const Index nb = fe_->n_block_dofs();

  m_ = assemble_p1_mass(*fe_);
  k_ = assemble_p1_stiffness(*fe_);
  mb_ = assemble_p1b_mass(*fe_);
  kb_ = assemble_p1b_stiffness(*fe_);
  b_blocks_ = assemble_coupling_blocks(*fe_, Vector::Ones(nv));
  b_ = compose_blocks(2 * nb, nv, {{&b_blocks_[0], 0, 0}, {&b_blocks_[1], nb, 0}});
  if (phys_.mobility.is_constant()) {
    k_mobility_constant_ = k_;
    k_mobility_constant_ *= phys_.mobility.coeff;
  }
  jacobian_layout_ =
      BlockComposer(2 * nv, 2 * nv, {{&m_, 0, 0}, {&m_, 0, nv}, {&m_, nv, 0}, {&m_, nv, 0}, {&m_, nv, nv}});
  unit_mass_norm_ = (m_ * Vector::Ones(nv)).norm();

  dirichlet_block_row_.assign(static_cast<std::size_t>(nb), 0);
  for (Index v : fe_->dirichlet_block_dofs()) dirichlet_block_row_[static_cast<std::size_t>(v)] = 1;
  bc_values_ = Vector::Zero(fe_->n_velocity_dofs());
  if (bc.value) {
    for (Index v : fe_->dirichlet_block_dofs()) {
      const Vec2 g = bc.value(fe_->mesh().vertices()[static_cast<std::size_t>(v)]);
      bc_values_[v] = g.x;
      bc_values_[nb + v] = g.y;
    }
  }
  energy_ = std::make_unique<EnergyEvaluator>(fe_);
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;

const EnergyEvaluator& Stepper::energy() const { return *energy_; }

HalfStep Stepper::extrapolate_half(const SimState& s) const {
  if (s.k < 1) throw InvalidArgument("extrapolation needs two history levels (k >= 1); run the startup step first");
  check_field(*fe_, s.phi_k, Space::scalar_p1);
  check_field(*fe_, s.phi_km1, Space::scalar_p1);
  check_field(*fe_, s.u_k, Space::velocity_p1b);
  check_field(*fe_, s.u_km1, Space::velocity_p1b);
  HalfStep h;
  h.phi_tilde = Field{Space::scalar_p1, 1.5 * s.phi_k.coeffs - 0.5 * s.phi_km1.coeffs};
  h.u_tilde = Field{Space::velocity_p1b, 1.5 * s.u_k.coeffs - 0.5 * s.u_km1.coeffs};
  return h;
}

void Stepper::apply_velocity_dirichlet(Vector& rhs_block, int component) const {
  const Index nb = fe_->n_block_dofs();
  for (Index v : fe_->dirichlet_block_dofs()) rhs_block[v] = bc_values_[component * nb + v];
}

void Stepper::prepare(StepContext& ctx, const SimState& s, const Vector& phi_tilde, const Vector& u_conv, Order order,
                      bool factor_velocity) {
  ctx.order = order;
  ctx.s = &s;
  ctx.phi_tilde = phi_tilde;
  ctx.phi_explicit = order == Order::second ? phi_tilde : s.phi_k.coeffs;
  ctx.alpha = order == Order::second ? 2.0 : 1.0;
  if (phys_.mobility.is_constant()) {
    ctx.k_mob = k_mobility_constant_;
  } else {
    const double eps = phys_.epsilon;
    const Mobility mob = phys_.mobility;
    ctx.k_mob = assemble_p1_stiffness(*fe_, &ctx.phi_tilde, [mob, eps](double p) { return mob(p, eps); }, true);
  }
  ctx.g = assemble_coupling_blocks(*fe_, ctx.phi_tilde);
  ctx.velocity_ready = false;
  ctx.jacobian_ready = false;
  if (!factor_velocity || scheme_.freeze_velocity) return;

  const double dt = scheme_.dt;
  SparseOperator a = mb_;
  double* v = a.valuePtr();
  const double* km = kb_.valuePtr();
  const double* mm = mb_.valuePtr();
  for (Eigen::Index i = 0; i < a.nonZeros(); ++i) v[i] = ctx.alpha * mm[i] + dt / phys_.Re * km[i];
  if (u_conv.cwiseAbs().maxCoeff() > 0.0) {
    const SparseOperator n = assemble_convection_block(*fe_, u_conv);
    const double* nn = n.valuePtr();
    for (Eigen::Index i = 0; i < a.nonZeros(); ++i) v[i] += dt * nn[i];
  }
  replace_rows_with_identity(a, dirichlet_block_row_);
  velocity_lu_.factorize(a);
  ctx.velocity_ready = true;
}

namespace {

// Nonlinear part F(phi1) of the chemical-potential equation and its Jacobian.
struct Quartic {
  bool second_order;
  double value(double p1, double pk) const {
    return second_order ? convex_secant(p1, pk) : p1 * p1 * p1;
  }
  double slope(double p1, double pk) const {
    return second_order ? 0.25 * (3.0 * p1 * p1 + 2.0 * p1 * pk + pk * pk) : 3.0 * p1 * p1;
  }
};

Vector nonlinear_load(const FeSystem& fe, const Quartic& f, const Vector& p1, const Vector& pk) {
  Vector out = Vector::Zero(fe.n_scalar_dofs());
  const auto& tris = fe.mesh().triangles();
  for (Index t = 0; t < fe.mesh().n_triangles(); ++t) {
    const auto& tri = tris[static_cast<std::size_t>(t)];
    const double area = fe.geometry(t).area;
    for (const auto& q : fe.quadrature()) {
      const double w = area * q.weight * f.value(eval_scalar_at(fe, p1, t, q.bary), eval_scalar_at(fe, pk, t, q.bary));
      for (int i = 0; i < 3; ++i) out[tri[i]] += w * q.bary[i];
    }
  }
  return out;
}

SparseOperator nonlinear_jacobian(const FeSystem& fe, const Quartic& f, const Vector& p1, const Vector& pk) {
  return fe.p1_pattern().assemble([&](Index t, double* local) {
    const double area = fe.geometry(t).area;
    for (const auto& q : fe.quadrature()) {
      const double w = area * q.weight * f.slope(eval_scalar_at(fe, p1, t, q.bary), eval_scalar_at(fe, pk, t, q.bary));
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) local[3 * i + j] += w * q.bary[i] * q.bary[j];
      }
    }
  });
}

}  // namespace

NewtonResult Stepper::newton(const StepContext& ctx, const Vector& u_bar, const Vector& phi_guess,
                             const Vector& mu_guess) {
  const Index n = fe_->n_scalar_dofs();
  const Index nb = fe_->n_block_dofs();
  const double dt = scheme_.dt;
  const Vector& pk = ctx.s->phi_k.coeffs;
  const Quartic f{ctx.order == Order::second};
  const double a_eps = (ctx.order == Order::second ? 0.5 : 1.0) * phys_.epsilon * phys_.epsilon;

  Vector transport = Vector::Zero(n);
  if (u_bar.size() == 2 * nb && u_bar.cwiseAbs().maxCoeff() > 0.0) {
    transport = dt * (ctx.g[0].transpose() * u_bar.head(nb) + ctx.g[1].transpose() * u_bar.tail(nb));
  }
  const Vector rhs1 = m_ * pk + transport;
  Vector rhs2 = m_ * ctx.phi_explicit;
  if (ctx.order == Order::second) rhs2 -= a_eps * (k_ * pk);

  NewtonResult out;
  Vector phi = phi_guess;
  Vector mu = mu_guess;
  double prev_res = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    const Vector r1 = m_ * phi + dt * (ctx.k_mob * mu) - rhs1;
    const Vector r2 = m_ * mu - nonlinear_load(*fe_, f, phi, pk) - a_eps * (k_ * phi) + rhs2;
    const double res = std::sqrt(r1.squaredNorm() + r2.squaredNorm()) / unit_mass_norm_;
    if (res <= scheme_.newton_tol) {
      out.phi = Field{Space::scalar_p1, std::move(phi)};
      out.mu = Field{Space::scalar_p1, std::move(mu)};
      out.iterations = it;
      out.residual = res;
      return out;
    }
    if (!std::isfinite(res) || it >= scheme_.newton_max) {
      throw ConvergenceError("Newton did not converge in " + std::to_string(it) +
                                 " iterations (relative residual " + std::to_string(res) + ")",
                             res);
    }
    const bool refresh = !scheme_.newton_reuse_jacobian || !ctx.jacobian_ready || res > 0.25 * prev_res;
    if (refresh) {
      const SparseOperator fp = nonlinear_jacobian(*fe_, f, phi, pk);
      const SparseOperator jac =
          jacobian_layout_.compose({&m_, &ctx.k_mob, &fp, &k_, &m_}, {1.0, dt, -1.0, -a_eps, 1.0});
      jacobian_lu_.factorize(jac);
      ctx.jacobian_ready = true;
    }
    prev_res = res;
    const Vector dz = jacobian_lu_.solve(-stack(r1, r2));
    phi += dz.head(n);
    mu += dz.tail(n);
  }
}

Vector Stepper::momentum(const StepContext& ctx, const Vector& mu) {
  const Index nb = fe_->n_block_dofs();
  if (!ctx.velocity_ready) throw InvalidArgument("momentum operator was not prepared");
  const double dt = scheme_.dt;
  const double coup = phys_.coupling();
  const SimState& s = *ctx.s;
  Vector out(2 * nb);
  for (int c = 0; c < 2; ++c) {
    Vector rhs = ctx.alpha * (mb_ * s.u_k.coeffs.segment(c * nb, nb));
    rhs -= dt * (b_blocks_[c] * s.p_k.coeffs);
    rhs -= dt * coup * (ctx.g[c] * mu);
    apply_velocity_dirichlet(rhs, c);
    out.segment(c * nb, nb) = velocity_lu_.solve(rhs);
  }
  return out;
}

PicardResult Stepper::picard(const StepContext& ctx, const Vector& u_start, const Vector& mu_start) {
  const Index nb = fe_->n_block_dofs();
  auto norm_m = [&](const Vector& u) {
    return std::sqrt(u.head(nb).dot(mb_ * u.head(nb)) + u.tail(nb).dot(mb_ * u.tail(nb)));
  };
  PicardResult out;
  Vector u = scheme_.freeze_velocity ? Vector::Zero(2 * nb) : u_start;
  Vector phi = ctx.s->phi_k.coeffs;
  Vector mu = mu_start;
  std::deque<Vector> d_res;
  std::deque<Vector> d_map;
  Vector prev_res;
  Vector prev_map;
  double inc = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= scheme_.picard_max; ++it) {
    NewtonResult nr = newton(ctx, u, phi, mu);
    out.newton_iterations += nr.iterations;
    phi = std::move(nr.phi.coeffs);
    mu = std::move(nr.mu.coeffs);
    if (scheme_.freeze_velocity) {
      out.iterations = it;
      out.increment = 0.0;
      out.u_half = Field{Space::velocity_p1b, std::move(u)};
      out.phi = Field{Space::scalar_p1, std::move(phi)};
      out.mu = Field{Space::scalar_p1, std::move(mu)};
      return out;
    }
    Vector u_new = momentum(ctx, mu);
    inc = norm_m(u_new - u) / std::max(norm_m(u_new), scheme_.picard_floor);
    if (inc <= scheme_.picard_tol) {
      out.iterations = it;
      out.increment = inc;
      out.u_half = Field{Space::velocity_p1b, std::move(u_new)};
      out.phi = Field{Space::scalar_p1, std::move(phi)};
      out.mu = Field{Space::scalar_p1, std::move(mu)};
      return out;
    }
    if (scheme_.anderson_depth == 0) {
      u = std::move(u_new);
      continue;
    }
    // Anderson mixing on the map u -> u_new.
    Vector res = u_new - u;
    if (prev_res.size()) {
      d_res.push_back(res - prev_res);
      d_map.push_back(u_new - prev_map);
      if (static_cast<int>(d_res.size()) > scheme_.anderson_depth) {
        d_res.pop_front();
        d_map.pop_front();
      }
    }
    prev_res = res;
    prev_map = u_new;
    if (d_res.empty()) {
      u = std::move(u_new);
      continue;
    }
    Eigen::MatrixXd df(res.size(), static_cast<Eigen::Index>(d_res.size()));
    Eigen::MatrixXd dg(res.size(), static_cast<Eigen::Index>(d_res.size()));
    for (std::size_t j = 0; j < d_res.size(); ++j) {
      df.col(static_cast<Eigen::Index>(j)) = d_res[j];
      dg.col(static_cast<Eigen::Index>(j)) = d_map[j];
    }
    const Eigen::VectorXd gamma = df.colPivHouseholderQr().solve(res);
    u = u_new - dg * gamma;
  }
  throw ConvergenceError("Picard iteration did not converge in " + std::to_string(scheme_.picard_max) +
                             " iterations (last relative increment " + std::to_string(inc) + ")",
                         inc);
}

NewtonResult Stepper::ch_newton_step(const SimState& s, const Field& u_bar, const Field& phi_tilde) {
  check_field(*fe_, s.phi_k, Space::scalar_p1);
  check_field(*fe_, u_bar, Space::velocity_p1b);
  check_field(*fe_, phi_tilde, Space::scalar_p1);
  StepContext ctx;
  prepare(ctx, s, phi_tilde.coeffs, Vector(), Order::second, false);
  const Vector mu0 = s.mu_half.coeffs.size() == s.phi_k.coeffs.size() ? s.mu_half.coeffs
                                                                        : Vector::Zero(fe_->n_scalar_dofs());
  return newton(ctx, u_bar.coeffs, s.phi_k.coeffs, mu0);
}

Field Stepper::ns_viscous_step(const SimState& s, const Field& mu, const Field& phi_tilde, const Field& u_tilde) {
  check_field(*fe_, mu, Space::scalar_p1);
  check_field(*fe_, phi_tilde, Space::scalar_p1);
  check_field(*fe_, u_tilde, Space::velocity_p1b);
  if (scheme_.freeze_velocity) return zero_field(*fe_, Space::velocity_p1b);
  StepContext ctx;
  prepare(ctx, s, phi_tilde.coeffs, u_tilde.coeffs, Order::second, true);
  return Field{Space::velocity_p1b, momentum(ctx, mu.coeffs)};
}

PicardResult Stepper::picard_solve(const SimState& s) {
  const HalfStep h = extrapolate_half(s);
  StepContext ctx;
  prepare(ctx, s, h.phi_tilde.coeffs, h.u_tilde.coeffs, Order::second, true);
  return picard(ctx, h.u_tilde.coeffs, s.mu_half.coeffs);
}

SparseLu& Stepper::darcy_lu(double theta) {
  for (auto& [th, lu] : darcy_->by_theta) {
    if (th == theta) return lu;
  }
  const Index nv = fe_->n_scalar_dofs();
  const Index nu = fe_->n_velocity_dofs();
  const SparseOperator mu_full = block_diagonal2(mb_);
  SparseOperator a = compose_blocks(nu + nv, nu + nv, {{&mu_full, 0, 0}, {&b_, 0, nu, theta}, {&b_, nu, 0, 1.0, true}});
  std::vector<char> flag(static_cast<std::size_t>(nu + nv), 0);
  for (Index d : fe_->dirichlet_velocity_dofs()) flag[static_cast<std::size_t>(d)] = 1;
  replace_rows_with_identity(a, flag);
  Vector border = Vector::Zero(nu + nv);
  border.tail(nv) = fe_->scalar_basis_integrals();
  darcy_->by_theta.emplace_back(theta, SparseLu(a, &border));
  return darcy_->by_theta.back().second;
}

ProjectionResult Stepper::project(const Vector& u_bar, const SimState& s, double theta, Projection kind) {
  const Index nv = fe_->n_scalar_dofs();
  const Index nb = fe_->n_block_dofs();
  const Index nu = fe_->n_velocity_dofs();
  ProjectionResult out;
  out.u_bar = Field{Space::velocity_p1b, u_bar};
  Vector u1(nu);
  Vector dp;
  if (kind == Projection::darcy_coupled) {
    Vector rhs = Vector::Zero(nu + nv);
    for (int c = 0; c < 2; ++c) {
      Vector rc = mb_ * u_bar.segment(c * nb, nb);
      apply_velocity_dirichlet(rc, c);
      rhs.segment(c * nb, nb) = rc;
    }
    const Vector x = darcy_lu(theta).solve(rhs);
    u1 = x.head(nu);
    dp = x.tail(nv);
  } else {
    if (!poisson_lu_) poisson_lu_.emplace(k_, &fe_->scalar_basis_integrals());
    dp = poisson_lu_->solve((1.0 / theta) * (b_.transpose() * u_bar));
    if (!dirichlet_mass_lu_) {
      SparseOperator md = mb_;
      replace_rows_with_identity(md, dirichlet_block_row_);
      dirichlet_mass_lu_.emplace(md);
    }
    for (int c = 0; c < 2; ++c) {
      Vector rc = mb_ * u_bar.segment(c * nb, nb) - theta * (b_blocks_[c] * dp);
      apply_velocity_dirichlet(rc, c);
      u1.segment(c * nb, nb) = dirichlet_mass_lu_->solve(rc);
    }
  }
  remove_mean(*fe_, dp);
  out.divergence_residual = (b_.transpose() * u1).cwiseAbs().maxCoeff();
  out.u = Field{Space::velocity_p1b, std::move(u1)};
  out.p = Field{Space::pressure_p1_meanzero, s.p_k.coeffs + dp};
  out.dp = Field{Space::pressure_p1_meanzero, std::move(dp)};
  return out;
}

ProjectionResult Stepper::projection_darcy(const Field& u_half, const SimState& s) {
  check_field(*fe_, u_half, Space::velocity_p1b);
  return project(2.0 * u_half.coeffs - s.u_k.coeffs, s, 0.5 * scheme_.dt, Projection::darcy_coupled);
}

ProjectionResult Stepper::projection_poisson(const Field& u_half, const SimState& s) {
  check_field(*fe_, u_half, Space::velocity_p1b);
  return project(2.0 * u_half.coeffs - s.u_k.coeffs, s, 0.5 * scheme_.dt, Projection::pressure_poisson);
}

StepReport Stepper::report_for(const SimState& before, const SimState& after, const StepContext& ctx,
                               const PicardResult& pic, const ProjectionResult& proj) {
  const double dt = scheme_.dt;
  const double coup = phys_.coupling();
  const Index nb = fe_->n_block_dofs();
  StepReport r;
  r.step = after.k;
  r.t = after.t;
  r.picard_iters = pic.iterations;
  r.newton_iters = pic.newton_iterations;
  r.picard_increment = pic.increment;
  const Vector& w = fe_->scalar_basis_integrals();
  r.mass_change = w.dot(after.phi_k.coeffs) - w.dot(before.phi_k.coeffs);
  const EnergyRecord e0 = energy_->compute(before, phys_, dt);
  const EnergyRecord e1 = energy_->compute(after, phys_, dt);
  r.energy_before = e0.E_app;
  r.energy_after = e1.E_app;
  r.divergence_residual = proj.divergence_residual;
  const Vector& ub = pic.u_half.coeffs;
  r.dissipation_mobility = dt * coup * pic.mu.coeffs.dot(ctx.k_mob * pic.mu.coeffs);
  r.dissipation_viscous =
      dt / phys_.Re * (ub.head(nb).dot(kb_ * ub.head(nb)) + ub.tail(nb).dot(kb_ * ub.tail(nb)));
  if (ctx.order == Order::second) {
    r.dissipation_phase =
        0.25 * coup * energy_->l2_sq(after.phi_k.coeffs - 2.0 * before.phi_k.coeffs + before.phi_km1.coeffs);
    const double diss = r.dissipation_mobility + r.dissipation_viscous + r.dissipation_phase;
    r.identity_residual = e1.E_app - e0.E_app + diss;
    r.identity_residual_discrete = e1.E_app_discrete - e0.E_app_discrete + diss;
  } else {
    r.identity_residual = std::numeric_limits<double>::quiet_NaN();
    r.identity_residual_discrete = std::numeric_limits<double>::quiet_NaN();
  }
  if (!scheme_.freeze_velocity) {
    const Vector du = proj.u.coeffs - proj.u_bar.coeffs;
    const double half_jump = 0.5 * (du.head(nb).dot(mb_ * du.head(nb)) + du.tail(nb).dot(mb_ * du.tail(nb)));
    const double dp_max = proj.dp.coeffs.cwiseAbs().maxCoeff();
    const double theta = ctx.order == Order::second ? 0.5 * dt : dt;
    const double theta_sq = 0.5 * theta * theta;
    r.projection_defect = theta_sq * energy_->pressure_gradient_sq(proj.dp) - half_jump;
    r.projection_defect_discrete =
        (dp_max == 0.0 ? 0.0 : theta_sq * energy_->discrete_pressure_gradient_sq(proj.dp)) - half_jump;
  }
  return r;
}

AdvanceResult Stepper::startup_first_order(const Field& phi0, const Field& u0) {
  const SimState s0 = initial_state(*fe_, phi0, u0);
  try {
    StepContext ctx;
    prepare(ctx, s0, s0.phi_k.coeffs, s0.u_k.coeffs, Order::first, true);
    const PicardResult pic = picard(ctx, s0.u_k.coeffs, s0.mu_half.coeffs);
    ProjectionResult proj;
    if (scheme_.freeze_velocity) {
      proj.u = zero_field(*fe_, Space::velocity_p1b);
      proj.u_bar = proj.u;
      proj.p = s0.p_k;
      proj.dp = zero_field(*fe_, Space::pressure_p1_meanzero);
    } else {
      proj = project(pic.u_half.coeffs, s0, scheme_.dt, scheme_.projection);
    }
    AdvanceResult out;
    out.state.phi_km1 = s0.phi_k;
    out.state.phi_k = pic.phi;
    out.state.u_km1 = scheme_.freeze_velocity ? proj.u : s0.u_k;
    out.state.u_k = proj.u;
    out.state.p_k = proj.p;
    out.state.mu_half = pic.mu;
    out.state.k = 1;
    out.state.t = s0.t + scheme_.dt;
    out.report = report_for(s0, out.state, ctx, pic, proj);
    return out;
  } catch (const Error&) {
    rethrow_with_step(1, scheme_.dt);
  }
}

AdvanceResult Stepper::advance(const SimState& s) {
  if (s.k < 1) throw InvalidArgument("advance needs k >= 1; run startup_first_order first");
  try {
    const HalfStep h = extrapolate_half(s);
    StepContext ctx;
    prepare(ctx, s, h.phi_tilde.coeffs, h.u_tilde.coeffs, Order::second, true);
    const PicardResult pic = picard(ctx, h.u_tilde.coeffs, s.mu_half.coeffs);
    ProjectionResult proj;
    if (scheme_.freeze_velocity) {
      proj.u = zero_field(*fe_, Space::velocity_p1b);
      proj.u_bar = proj.u;
      proj.p = s.p_k;
      proj.dp = zero_field(*fe_, Space::pressure_p1_meanzero);
    } else {
      proj = project(2.0 * pic.u_half.coeffs - s.u_k.coeffs, s, 0.5 * scheme_.dt, scheme_.projection);
    }
    AdvanceResult out;
    out.state.phi_km1 = s.phi_k;
    out.state.phi_k = pic.phi;
    out.state.u_km1 = s.u_k;
    out.state.u_k = proj.u;
    out.state.p_k = proj.p;
    out.state.mu_half = pic.mu;
    out.state.k = s.k + 1;
    out.state.t = s.t + scheme_.dt;
    out.report = report_for(s, out.state, ctx, pic, proj);
    return out;
  } catch (const Error&) {
    rethrow_with_step(s.k + 1, s.t + scheme_.dt);
  }
}

Field Stepper::phase_for_potential(const SimState& s, const Field& phi_tilde, const Field& mu) {
  check_field(*fe_, mu, Space::scalar_p1);
  check_field(*fe_, phi_tilde, Space::scalar_p1);
  const Vector& pk = s.phi_k.coeffs;
  const Quartic f{true};
  const double a_eps = 0.5 * phys_.epsilon * phys_.epsilon;
  const Vector fixed = m_ * mu.coeffs + m_ * phi_tilde.coeffs - a_eps * (k_ * pk);
  Vector phi = pk;
  for (int it = 0;; ++it) {
    const Vector r = fixed - nonlinear_load(*fe_, f, phi, pk) - a_eps * (k_ * phi);
    const double res = r.norm() / unit_mass_norm_;
    if (res <= scheme_.newton_tol) return Field{Space::scalar_p1, phi};
    if (!std::isfinite(res) || it >= scheme_.newton_max) {
      throw ConvergenceError("phase solve did not converge (relative residual " + std::to_string(res) + ")", res);
    }
    SparseOperator jac = nonlinear_jacobian(*fe_, f, phi, pk);
    jac += a_eps * k_;
    phase_lu_.factorize(jac);
    phi += phase_lu_.solve(r);
  }
}

Vector Stepper::reduced_operator(const SimState& s, const Field& mu) {
  const HalfStep h = extrapolate_half(s);
  StepContext ctx;
  prepare(ctx, s, h.phi_tilde.coeffs, h.u_tilde.coeffs, Order::second, true);
  const Field phi = phase_for_potential(s, h.phi_tilde, mu);
  const Index nb = fe_->n_block_dofs();
  const double dt = scheme_.dt;
  Vector t = m_ * (phi.coeffs - s.phi_k.coeffs) + dt * (ctx.k_mob * mu.coeffs);
  if (!scheme_.freeze_velocity) {
    const Vector u = momentum(ctx, mu.coeffs);
    t -= dt * (ctx.g[0].transpose() * u.head(nb) + ctx.g[1].transpose() * u.tail(nb));
  }
  return t;
}

}  // namespace chns
