#include "chns/assembly.hpp"

#include <cmath>

#include "chns/error.hpp"

namespace chns {

SparseOperator assemble_p1_mass(const FeSystem& fe) {
  return fe.p1_pattern().assemble([&](Index e, double* local) {
    const double a = fe.geometry(e).area;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) local[3 * i + j] = (i == j ? a / 6.0 : a / 12.0);
    }
  });
}

SparseOperator assemble_p1b_mass(const FeSystem& fe) {
  const auto& rule = triangle_rule(kP1bMassDegree);
  return fe.p1b_pattern().assemble([&](Index e, double* local) {
    const double a = fe.geometry(e).area;
    for (const auto& q : rule) {
      const auto v = p1b_values(q.bary);
      const double w = a * q.weight;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) local[4 * i + j] += w * v[i] * v[j];
      }
    }
  });
}

SparseOperator assemble_p1_stiffness(const FeSystem& fe, const Vector* weight, const PointwiseMap& g,
                                     bool require_positive) {
  if (weight == nullptr) {
    return fe.p1_pattern().assemble([&](Index e, double* local) {
      const auto& geo = fe.geometry(e);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          local[3 * i + j] = geo.area * (geo.grad[i][0] * geo.grad[j][0] + geo.grad[i][1] * geo.grad[j][1]);
        }
      }
    });
  }
  if (weight->size() != fe.n_scalar_dofs()) throw InvalidArgument("stiffness weight must be a P1 field");
  if (require_positive) {
    // Checked serially so the error is deterministic.
    for (Index e = 0; e < fe.mesh().n_triangles(); ++e) {
      for (const auto& q : fe.quadrature()) {
        const double c = g ? g(eval_scalar_at(fe, *weight, e, q.bary)) : eval_scalar_at(fe, *weight, e, q.bary);
        if (!(c > 0.0)) throw InvalidArgument("stiffness coefficient must be positive, got " + std::to_string(c));
      }
    }
  }
  return fe.p1_pattern().assemble([&](Index e, double* local) {
    const auto& geo = fe.geometry(e);
    double avg = 0.0;
    for (const auto& q : fe.quadrature()) {
      const double w = eval_scalar_at(fe, *weight, e, q.bary);
      avg += q.weight * (g ? g(w) : w);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        local[3 * i + j] = avg * geo.area * (geo.grad[i][0] * geo.grad[j][0] + geo.grad[i][1] * geo.grad[j][1]);
      }
    }
  });
}

SparseOperator assemble_p1b_stiffness(const FeSystem& fe) {
  const auto& rule = triangle_rule(4);
  return fe.p1b_pattern().assemble([&](Index e, double* local) {
    const auto& geo = fe.geometry(e);
    for (const auto& q : rule) {
      const auto gr = p1b_gradients(geo, q.bary);
      const double w = geo.area * q.weight;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) local[4 * i + j] += w * (gr[i][0] * gr[j][0] + gr[i][1] * gr[j][1]);
      }
    }
  });
}

SparseOperator assemble_convection_block(const FeSystem& fe, const Vector& w) {
  if (w.size() != fe.n_velocity_dofs()) throw InvalidArgument("advecting velocity has wrong length");
  const auto& rule = triangle_rule(kConvectionDegree);
  return fe.p1b_pattern().assemble([&](Index e, double* local) {
    const auto& geo = fe.geometry(e);
    for (const auto& q : rule) {
      const Vec2 wq = eval_velocity_at(fe, w, e, q.bary);
      const auto v = p1b_values(q.bary);
      const auto gr = p1b_gradients(geo, q.bary);
      std::array<double, 4> s{};
      for (int a = 0; a < 4; ++a) s[a] = wq.x * gr[a][0] + wq.y * gr[a][1];
      const double wt = 0.5 * geo.area * q.weight;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) local[4 * i + j] += wt * (s[j] * v[i] - s[i] * v[j]);
      }
    }
  });
}

std::array<SparseOperator, 2> assemble_coupling_blocks(const FeSystem& fe, const Vector& phi_tilde) {
  if (phi_tilde.size() != fe.n_scalar_dofs()) throw InvalidArgument("coupling weight must be a P1 field");
  const auto& rule = triangle_rule(kCouplingDegree);
  std::array<SparseOperator, 2> out;
  for (int c = 0; c < 2; ++c) {
    out[c] = fe.coupling_pattern().assemble([&](Index e, double* local) {
      const auto& geo = fe.geometry(e);
      for (const auto& q : rule) {
        const double ph = eval_scalar_at(fe, phi_tilde, e, q.bary);
        const auto v = p1b_values(q.bary);
        const double w = geo.area * q.weight * ph;
        for (int a = 0; a < 4; ++a) {
          for (int j = 0; j < 3; ++j) local[3 * a + j] += w * geo.grad[j][c] * v[a];
        }
      }
    });
  }
  return out;
}

std::array<SparseOperator, 2> assemble_divergence_blocks(const FeSystem& fe) {
  const auto& rule = triangle_rule(4);
  std::array<SparseOperator, 2> out;
  for (int c = 0; c < 2; ++c) {
    // Assembled as (block rows x P1 cols) then transposed.
    SparseOperator dt = fe.coupling_pattern().assemble([&](Index e, double* local) {
      const auto& geo = fe.geometry(e);
      for (const auto& q : rule) {
        const auto gr = p1b_gradients(geo, q.bary);
        const double w = geo.area * q.weight;
        for (int a = 0; a < 4; ++a) {
          for (int j = 0; j < 3; ++j) local[3 * a + j] += w * gr[a][c] * q.bary[j];
        }
      }
    });
    out[c] = dt.transpose();
    out[c].makeCompressed();
  }
  return out;
}

SparseOperator assemble_mass(const FeSystem& fe, Space space) {
  if (space == Space::velocity_p1b) return block_diagonal2(assemble_p1b_mass(fe));
  return assemble_p1_mass(fe);
}

SparseOperator assemble_weighted_stiffness(const FeSystem& fe, Space space, const Field* weight, const PointwiseMap& g) {
  if (space == Space::velocity_p1b) {
    if (weight != nullptr || g) throw InvalidArgument("weighted velocity stiffness is not supported");
    return block_diagonal2(assemble_p1b_stiffness(fe));
  }
  if (weight != nullptr) check_field(fe, *weight, Space::scalar_p1);
  return assemble_p1_stiffness(fe, weight ? &weight->coeffs : nullptr, g, weight != nullptr && g != nullptr);
}

SparseOperator assemble_convection(const FeSystem& fe, const Field& w) {
  check_field(fe, w, Space::velocity_p1b);
  return block_diagonal2(assemble_convection_block(fe, w.coeffs));
}

SparseOperator assemble_phase_coupling(const FeSystem& fe, const Field& phi_tilde) {
  check_field(fe, phi_tilde, Space::scalar_p1);
  const auto g = assemble_coupling_blocks(fe, phi_tilde.coeffs);
  const Index nb = fe.n_block_dofs();
  return compose_blocks(2 * nb, fe.n_scalar_dofs(), {{&g[0], 0, 0}, {&g[1], nb, 0}});
}

SparseOperator assemble_pressure_gradient(const FeSystem& fe) {
  return assemble_phase_coupling(fe, Field{Space::scalar_p1, Vector::Ones(fe.n_scalar_dofs())});
}

SparseOperator assemble_divergence(const FeSystem& fe) {
  const auto d = assemble_divergence_blocks(fe);
  const Index nb = fe.n_block_dofs();
  return compose_blocks(fe.n_scalar_dofs(), 2 * nb, {{&d[0], 0, 0}, {&d[1], 0, nb}});
}

}  // namespace chns
