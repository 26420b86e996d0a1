#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "chns/mesh.hpp"
#include "chns/quadrature.hpp"
#include "chns/sparse.hpp"

namespace chns {

/// Finite-element spaces used by the solver.
///  - scalar_p1: continuous P1 (phase field, chemical potential).
///  - velocity_p1b: vector P1 + cubic bubble, two components.
///  - pressure_p1_meanzero: P1 with zero mean.
enum class Space { scalar_p1, velocity_p1b, pressure_p1_meanzero };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Discrete field: coefficients indexed by the dofs of its space.
///
/// Velocity coefficients are laid out component-major: [x-block, y-block],
/// each block holding the vertex dofs followed by one bubble per triangle.
struct Field {
  Space space = Space::scalar_p1;
  Vector coeffs;
};

/// Affine map data of one triangle: area and the (constant) gradients of its
/// three barycentric coordinates.
struct ElementGeometry {
  double area;
  std::array<std::array<double, 2>, 3> grad;
};

/// Values of the four scalar P1b basis functions (three vertices, bubble)
/// at barycentric point l. The bubble is 27 l0 l1 l2.
inline std::array<double, 4> p1b_values(const std::array<double, 3>& l) {
  return {l[0], l[1], l[2], 27.0 * l[0] * l[1] * l[2]};
}

inline std::array<std::array<double, 2>, 4> p1b_gradients(const ElementGeometry& g, const std::array<double, 3>& l) {
  std::array<std::array<double, 2>, 4> out{};
  for (int a = 0; a < 3; ++a) out[a] = g.grad[a];
  for (int d = 0; d < 2; ++d) {
    out[3][d] = 27.0 * (l[1] * l[2] * g.grad[0][d] + l[0] * l[2] * g.grad[1][d] + l[0] * l[1] * g.grad[2][d]);
  }
  return out;
}

/// Degree-of-freedom layout and element data for the P1 / P1b spaces on a mesh.
class FeSystem {
public:
  explicit FeSystem(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const noexcept { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }

  Index n_scalar_dofs() const noexcept { return mesh_->n_vertices(); }
  /// Dofs of one velocity component: vertices then bubbles.
  Index n_block_dofs() const noexcept { return mesh_->n_vertices() + mesh_->n_triangles(); }
  Index n_velocity_dofs() const noexcept { return 2 * n_block_dofs(); }
  Index n_dofs(Space s) const noexcept { return s == Space::velocity_p1b ? n_velocity_dofs() : n_scalar_dofs(); }

  Index velocity_dof(int component, Index block_dof) const noexcept { return component * n_block_dofs() + block_dof; }
  Index bubble_dof(Index triangle) const noexcept { return mesh_->n_vertices() + triangle; }

  /// Velocity dofs carrying Dirichlet data (boundary vertices, both components).
  const std::vector<Index>& dirichlet_velocity_dofs() const noexcept { return dirichlet_dofs_; }
  /// Same set restricted to one component block (block-local indices).
  const std::vector<Index>& dirichlet_block_dofs() const noexcept { return mesh_->boundary_vertices(); }

  const ElementGeometry& geometry(Index t) const { return geometry_[static_cast<std::size_t>(t)]; }
  std::array<Index, 4> block_dofs(Index t) const {
    const auto& tri = mesh_->triangles()[static_cast<std::size_t>(t)];
    return {tri[0], tri[1], tri[2], bubble_dof(t)};
  }

  /// Degree-4 rule used for the P1 forms and the quartic free energy.
  const QuadratureRule& quadrature() const noexcept { return triangle_rule(4); }

  /// integral of each P1 basis function; the mean-zero constraint row.
  const Vector& scalar_basis_integrals() const noexcept { return basis_integrals_; }

  const ScatterPattern& p1_pattern() const noexcept { return p1_pattern_; }
  const ScatterPattern& p1b_pattern() const noexcept { return p1b_pattern_; }
  /// Rows: one velocity component block; columns: scalar P1.
  const ScatterPattern& coupling_pattern() const noexcept { return coupling_pattern_; }

private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<ElementGeometry> geometry_;
  std::vector<Index> dirichlet_dofs_;
  Vector basis_integrals_;
  ScatterPattern p1_pattern_;
  ScatterPattern p1b_pattern_;
  ScatterPattern coupling_pattern_;
};

Field zero_field(const FeSystem& fe, Space space);

/// Throws InvalidArgument unless f has the right length for its space.
void check_field(const FeSystem& fe, const Field& f, Space expected);

/// Value of a scalar field in triangle t at barycentric point l.
double eval_scalar_at(const FeSystem& fe, const Vector& coeffs, Index t, const std::array<double, 3>& l);
/// Value of a velocity field (bubbles included) in triangle t at barycentric point l.
Vec2 eval_velocity_at(const FeSystem& fe, const Vector& coeffs, Index t, const std::array<double, 3>& l);

/// Point evaluation; throws OutsideDomain if x is not in the mesh.
double eval_scalar(const FeSystem& fe, const Field& f, Point x);
Vec2 eval_velocity(const FeSystem& fe, const Field& f, Point x);

/// Nodal interpolant. Pressure-space interpolants are shifted to zero mean.
Field interpolate(const FeSystem& fe, Space space, const std::function<double(Point)>& g);
/// Vertex values g(v); bubble coefficients zero.
Field interpolate_velocity(const FeSystem& fe, const std::function<Vec2(Point)>& g);

/// integral of a scalar P1 field.
double integrate(const FeSystem& fe, const Field& f);

/// Subtracts the mean so that the integral vanishes.
void remove_mean(const FeSystem& fe, Vector& p1_coeffs);

}  // namespace chns
