#include "chns/fespace.hpp"

#include <cmath>
#include <string>

#include "chns/error.hpp"

namespace chns {

FeSystem::FeSystem(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  if (!mesh_) throw InvalidArgument("FeSystem needs a mesh");
  const Index nv = mesh_->n_vertices();
  const Index nt = mesh_->n_triangles();
  const auto& verts = mesh_->vertices();

  geometry_.resize(static_cast<std::size_t>(nt));
  basis_integrals_ = Vector::Zero(nv);
  std::vector<std::int64_t> p1_dofs;
  std::vector<std::int64_t> p1b_dofs;
  p1_dofs.reserve(static_cast<std::size_t>(3 * nt));
  p1b_dofs.reserve(static_cast<std::size_t>(4 * nt));
  for (Index t = 0; t < nt; ++t) {
    const auto& tri = mesh_->triangles()[static_cast<std::size_t>(t)];
    const Point& a = verts[tri[0]];
    const Point& b = verts[tri[1]];
    const Point& c = verts[tri[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    ElementGeometry& g = geometry_[static_cast<std::size_t>(t)];
    g.area = 0.5 * det;
    // grad l_i = rot90(opposite edge) / det
    g.grad[0] = {(b.y - c.y) / det, (c.x - b.x) / det};
    g.grad[1] = {(c.y - a.y) / det, (a.x - c.x) / det};
    g.grad[2] = {(a.y - b.y) / det, (b.x - a.x) / det};
    for (int i = 0; i < 3; ++i) {
      basis_integrals_[tri[i]] += g.area / 3.0;
      p1_dofs.push_back(tri[i]);
      p1b_dofs.push_back(tri[i]);
    }
    p1b_dofs.push_back(nv + t);
  }
  p1_pattern_ = ScatterPattern(nv, nv, 3, 3, p1_dofs, p1_dofs);
  p1b_pattern_ = ScatterPattern(nv + nt, nv + nt, 4, 4, p1b_dofs, p1b_dofs);
  coupling_pattern_ = ScatterPattern(nv + nt, nv, 4, 3, p1b_dofs, p1_dofs);

  for (int c = 0; c < 2; ++c) {
    for (Index v : mesh_->boundary_vertices()) dirichlet_dofs_.push_back(velocity_dof(c, v));
  }
}

Field zero_field(const FeSystem& fe, Space space) { return Field{space, Vector::Zero(fe.n_dofs(space))}; }

void check_field(const FeSystem& fe, const Field& f, Space expected) {
  const bool scalar_like = expected != Space::velocity_p1b;
  const bool ok_space = scalar_like ? f.space != Space::velocity_p1b : f.space == Space::velocity_p1b;
  if (!ok_space) throw InvalidArgument("field lives in the wrong space");
  if (f.coeffs.size() != fe.n_dofs(expected)) {
    throw InvalidArgument("field has " + std::to_string(f.coeffs.size()) + " coefficients, space needs " +
                          std::to_string(fe.n_dofs(expected)));
  }
}

double eval_scalar_at(const FeSystem& fe, const Vector& coeffs, Index t, const std::array<double, 3>& l) {
  const auto& tri = fe.mesh().triangles()[static_cast<std::size_t>(t)];
  return coeffs[tri[0]] * l[0] + coeffs[tri[1]] * l[1] + coeffs[tri[2]] * l[2];
}

Vec2 eval_velocity_at(const FeSystem& fe, const Vector& coeffs, Index t, const std::array<double, 3>& l) {
  const auto dofs = fe.block_dofs(t);
  const auto phi = p1b_values(l);
  const Index nb = fe.n_block_dofs();
  Vec2 v;
  for (int a = 0; a < 4; ++a) {
    v.x += coeffs[dofs[a]] * phi[a];
    v.y += coeffs[nb + dofs[a]] * phi[a];
  }
  return v;
}

namespace {
Index locate_or_throw(const FeSystem& fe, Point x) {
  const auto t = fe.mesh().locate(x);
  if (!t) {
    throw OutsideDomain("point (" + std::to_string(x.x) + ", " + std::to_string(x.y) + ") is outside the domain");
  }
  return *t;
}
}  // namespace

double eval_scalar(const FeSystem& fe, const Field& f, Point x) {
  check_field(fe, f, Space::scalar_p1);
  const Index t = locate_or_throw(fe, x);
  return eval_scalar_at(fe, f.coeffs, t, fe.mesh().barycentric(t, x));
}

Vec2 eval_velocity(const FeSystem& fe, const Field& f, Point x) {
  check_field(fe, f, Space::velocity_p1b);
  const Index t = locate_or_throw(fe, x);
  return eval_velocity_at(fe, f.coeffs, t, fe.mesh().barycentric(t, x));
}

Field interpolate(const FeSystem& fe, Space space, const std::function<double(Point)>& g) {
  if (space == Space::velocity_p1b) throw InvalidArgument("use interpolate_velocity for vector data");
  Field f = zero_field(fe, space);
  const auto& verts = fe.mesh().vertices();
  for (Index v = 0; v < fe.n_scalar_dofs(); ++v) f.coeffs[v] = g(verts[static_cast<std::size_t>(v)]);
  if (space == Space::pressure_p1_meanzero) remove_mean(fe, f.coeffs);
  return f;
}

Field interpolate_velocity(const FeSystem& fe, const std::function<Vec2(Point)>& g) {
  Field f = zero_field(fe, Space::velocity_p1b);
  const auto& verts = fe.mesh().vertices();
  const Index nb = fe.n_block_dofs();
  for (Index v = 0; v < fe.n_scalar_dofs(); ++v) {
    const Vec2 val = g(verts[static_cast<std::size_t>(v)]);
    f.coeffs[v] = val.x;
    f.coeffs[nb + v] = val.y;
  }
  return f;
}

double integrate(const FeSystem& fe, const Field& f) {
  check_field(fe, f, Space::scalar_p1);
  return fe.scalar_basis_integrals().dot(f.coeffs);
}

void remove_mean(const FeSystem& fe, Vector& p1_coeffs) {
  const double mean = fe.scalar_basis_integrals().dot(p1_coeffs) / fe.mesh().area();
  p1_coeffs.array() -= mean;
}

}  // namespace chns
