#pragma once

#include <memory>
#include <optional>

#include "chns/sparse.hpp"

namespace chns {

/// A x = b, optionally with the extra condition c.x = 0 imposed through a
/// bordered system [[A, c], [c^T, 0]] (used for mean-zero pressures).
struct LinearSystem {
  SparseOperator matrix;
  Vector rhs;
  std::optional<Vector> mean_constraint;
};

struct SolveOptions {
  /// Residual contract: ||A x - b||_2 <= rtol ||b||_2, or, when that is below
  /// the rounding floor of the system, the normwise backward error
  /// ||r||_inf <= rtol (||A||_inf ||x||_inf + ||b||_inf).
  double rtol = 1e-12;
  int max_refinements = 4;
};

struct Solution {
  Vector x;
  double residual = 0.0;  ///< ||A x - b||_2 of the (bordered) system
  int refinements = 0;
};

/// Sparse direct LU factorization that can be reused for many right-hand
/// sides and refactorized for matrices with an unchanged pattern.
class SparseLu {
public:
  SparseLu();
  explicit SparseLu(const SparseOperator& a, const Vector* mean_constraint = nullptr, SolveOptions opts = {});
  ~SparseLu();
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;

  /// Numeric factorization. If the pattern matches the previous call the
  /// symbolic analysis is reused. Throws SolveError on a singular pivot.
  void factorize(const SparseOperator& a, const Vector* mean_constraint = nullptr);

  bool ready() const noexcept;
  std::int64_t size() const noexcept;  ///< unknowns excluding the border

  /// Solves with iterative refinement; throws SolveError if the residual
  /// contract cannot be met.
  Solution solve_detailed(const Vector& b) const;
  Vector solve(const Vector& b) const { return solve_detailed(b).x; }

  struct Impl;

private:
  std::unique_ptr<Impl> impl_;
  SolveOptions opts_;
};

/// One-shot solve of a LinearSystem.
Vector solve(const LinearSystem& sys, const SolveOptions& opts = {});

/// Name of the direct solver backend compiled in.
const char* direct_solver_backend();

}  // namespace chns
