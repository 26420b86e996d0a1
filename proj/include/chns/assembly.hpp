#pragma once

#include <array>
#include <functional>

#include "chns/fespace.hpp"
#include "chns/sparse.hpp"

namespace chns {

/// Scalar map applied pointwise to a weight field at quadrature nodes.
using PointwiseMap = std::function<double(double)>;

// Quadrature degree per form. Each is exact for the polynomial integrand of
// its form, except the weighted stiffness (non-polynomial coefficient).
inline constexpr int kP1bMassDegree = 6;
inline constexpr int kConvectionDegree = 8;
inline constexpr int kCouplingDegree = 4;

// --- Component-block forms ----------------------------------------------
// "Block" operators act on one velocity component (P1b scalar) or on P1.

SparseOperator assemble_p1_mass(const FeSystem& fe);
SparseOperator assemble_p1b_mass(const FeSystem& fe);

/// K_ij = integral g(w(x)) grad phi_j . grad phi_i on P1. Without a weight the
/// plain stiffness is built in closed form. With `require_positive`, any
/// g(w) <= 0 at a quadrature node throws InvalidArgument.
SparseOperator assemble_p1_stiffness(const FeSystem& fe, const Vector* weight = nullptr, const PointwiseMap& g = {},
                                     bool require_positive = false);
SparseOperator assemble_p1b_stiffness(const FeSystem& fe);

/// Skew-symmetric convection on one component: N_ij = b(w, psi_j, psi_i) with
/// b(u,v,z) = 1/2 [(u.grad v, z) - (u.grad z, v)]. `w` is a full velocity
/// coefficient vector.
SparseOperator assemble_convection_block(const FeSystem& fe, const Vector& w);

/// G_c[a, j] = integral phi_tilde d_c(phi_j) psi_a, c = x, y.
std::array<SparseOperator, 2> assemble_coupling_blocks(const FeSystem& fe, const Vector& phi_tilde);

/// D_c[j, a] = integral d_c(psi_a) phi_j: the divergence tested on P1.
std::array<SparseOperator, 2> assemble_divergence_blocks(const FeSystem& fe);

// --- Full-space operators -------------------------------------------------

/// Consistent mass matrix of the given space (block diagonal for velocity).
SparseOperator assemble_mass(const FeSystem& fe, Space space);

/// Weighted stiffness. For the velocity space only g == 1 is supported.
SparseOperator assemble_weighted_stiffness(const FeSystem& fe, Space space, const Field* weight = nullptr,
                                           const PointwiseMap& g = {});

/// Convection operator N(w) on the full velocity space.
SparseOperator assemble_convection(const FeSystem& fe, const Field& w);

/// G(phi_tilde): scalar dofs -> velocity dofs. (G mu)_v = (phi_tilde grad mu, v),
/// and its transpose gives (phi_tilde u, grad v) for the transport term.
SparseOperator assemble_phase_coupling(const FeSystem& fe, const Field& phi_tilde);

/// B: pressure dofs -> velocity dofs, B_ij = integral grad phi_j . psi_i.
SparseOperator assemble_pressure_gradient(const FeSystem& fe);

/// D: velocity dofs -> scalar dofs, D_ji = integral (div psi_i) phi_j.
SparseOperator assemble_divergence(const FeSystem& fe);

}  // namespace chns
