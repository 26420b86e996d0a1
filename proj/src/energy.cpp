#include "chns/energy.hpp"

#include "chns/assembly.hpp"
#include "chns/error.hpp"
#include "chns/stepper.hpp"

namespace chns {

EnergyEvaluator::EnergyEvaluator(std::shared_ptr<const FeSystem> fe) : fe_(std::move(fe)) {
  m_ = assemble_p1_mass(*fe_);
  k_ = assemble_p1_stiffness(*fe_);
  mb_ = assemble_p1b_mass(*fe_);
  b_ = assemble_coupling_blocks(*fe_, Vector::Ones(fe_->n_scalar_dofs()));
}

EnergyEvaluator::~EnergyEvaluator() = default;

double EnergyEvaluator::kinetic(const Field& u) const {
  check_field(*fe_, u, Space::velocity_p1b);
  const Index nb = fe_->n_block_dofs();
  double e = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto uc = u.coeffs.segment(c * nb, nb);
    e += uc.dot(mb_ * uc);
  }
  return 0.5 * e;
}

double EnergyEvaluator::bulk(const Field& phi) const {
  check_field(*fe_, phi, Space::scalar_p1);
  double sum = 0.0;
  for (Index t = 0; t < fe_->mesh().n_triangles(); ++t) {
    double local = 0.0;
    for (const auto& q : fe_->quadrature()) local += q.weight * double_well(eval_scalar_at(*fe_, phi.coeffs, t, q.bary));
    sum += local * fe_->geometry(t).area;
  }
  return sum;
}

double EnergyEvaluator::surface(const Field& phi, const PhysParams& phys) const {
  const double grad_sq = phi.coeffs.dot(k_ * phi.coeffs);
  return (bulk(phi) / phys.epsilon + 0.5 * phys.epsilon * grad_sq) / phys.We_star;
}

double EnergyEvaluator::l2_sq(const Vector& phi) const { return phi.dot(m_ * phi); }

double EnergyEvaluator::pressure_gradient_sq(const Field& p) const {
  check_field(*fe_, p, Space::pressure_p1_meanzero);
  return p.coeffs.dot(k_ * p.coeffs);
}

double EnergyEvaluator::discrete_pressure_gradient_sq(const Field& p) const {
  check_field(*fe_, p, Space::pressure_p1_meanzero);
  std::call_once(mass_once_, [&] {
    std::vector<char> flag(static_cast<std::size_t>(fe_->n_block_dofs()), 0);
    for (Index v : fe_->dirichlet_block_dofs()) flag[static_cast<std::size_t>(v)] = 1;
    SparseOperator md = mb_;
    replace_rows_with_identity(md, flag);
    interior_mass_lu_.emplace(md);
  });
  double sum = 0.0;
  for (int c = 0; c < 2; ++c) {
    Vector rhs = b_[c] * p.coeffs;
    for (Index v : fe_->dirichlet_block_dofs()) rhs[v] = 0.0;
    sum += rhs.dot(interior_mass_lu_->solve(rhs));
  }
  return sum;
}

EnergyRecord EnergyEvaluator::compute(const SimState& s, const PhysParams& phys, double dt) const {
  EnergyRecord r;
  r.t = s.t;
  r.kinetic = kinetic(s.u_k);
  r.surface = surface(s.phi_k, phys);
  r.E_ht = r.kinetic + r.surface;
  const double phase = 0.25 * phys.coupling() * l2_sq(s.phi_k.coeffs - s.phi_km1.coeffs);
  const double p_norm = s.p_k.coeffs.cwiseAbs().maxCoeff();
  const double pressure = p_norm == 0.0 ? 0.0 : dt * dt / 8.0 * pressure_gradient_sq(s.p_k);
  const double pressure_discrete = p_norm == 0.0 ? 0.0 : dt * dt / 8.0 * discrete_pressure_gradient_sq(s.p_k);
  r.E_app = r.E_ht + phase + pressure;
  r.E_app_discrete = r.E_ht + phase + pressure_discrete;
  r.mass = fe_->scalar_basis_integrals().dot(s.phi_k.coeffs);
  return r;
}

EnergyRecord compute_energies(const FeSystem& fe, const SimState& s, const PhysParams& phys, double dt) {
  const std::shared_ptr<const FeSystem> view(&fe, [](const FeSystem*) {});
  return EnergyEvaluator(view).compute(s, phys, dt);
}

}  // namespace chns
