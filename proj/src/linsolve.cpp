#include "chns/linsolve.hpp"

#include <cmath>
#include <string>

#include "chns/error.hpp"

#ifdef CHNS_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#endif

namespace chns {

namespace {

#ifdef CHNS_HAVE_UMFPACK
using Backend = Eigen::UmfPackLU<SparseOperator>;
#else
using Backend = Eigen::SparseLU<SparseOperator, Eigen::COLAMDOrdering<int>>;
#endif

SparseOperator bordered(const SparseOperator& a, const Vector& c) {
  const std::int64_t n = a.rows();
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * n));
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseOperator::InnerIterator it(a, col); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int i = 0; i < n; ++i) {
    if (c[i] != 0.0) {
      t.emplace_back(i, static_cast<int>(n), c[i]);
      t.emplace_back(static_cast<int>(n), i, c[i]);
    }
  }
  SparseOperator out(n + 1, n + 1);
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

bool same_pattern(const SparseOperator& a, const SparseOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  return std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr()) &&
         std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr());
}

}  // namespace

struct SparseLu::Impl {
  SparseOperator matrix;
  double matrix_norm = 0.0;
  bool bordered = false;
  bool analyzed = false;
  Backend lu;
};

namespace {
std::unique_ptr<SparseLu::Impl> make_impl() {
  auto impl = std::make_unique<SparseLu::Impl>();
#ifdef CHNS_HAVE_UMFPACK
  // Every system assembled here is structurally symmetric; the symmetric
  // strategy also keeps the dense mean-zero border from ruining the ordering.
  impl->lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
  // Prefer diagonal pivots: rejecting the small mass-matrix diagonals of the
  // mixed Cahn-Hilliard blocks causes heavy fill. Accuracy is guarded by
  // iterative refinement and the residual contract.
  impl->lu.umfpackControl()(UMFPACK_SYM_PIVOT_TOLERANCE) = 1e-6;
  // Refinement is done by solve_detailed only when the residual asks for it.
  impl->lu.umfpackControl()(UMFPACK_IRSTEP) = 0;
#endif
  return impl;
}
}  // namespace

SparseLu::SparseLu() : impl_(make_impl()) {}

SparseLu::SparseLu(const SparseOperator& a, const Vector* mean_constraint, SolveOptions opts)
    : impl_(make_impl()), opts_(opts) {
  factorize(a, mean_constraint);
}

SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

bool SparseLu::ready() const noexcept { return impl_ && impl_->matrix.rows() > 0; }

std::int64_t SparseLu::size() const noexcept {
  return impl_ ? impl_->matrix.rows() - (impl_->bordered ? 1 : 0) : 0;
}

void SparseLu::factorize(const SparseOperator& a, const Vector* mean_constraint) {
  if (a.rows() != a.cols()) throw InvalidArgument("linear system matrix must be square");
  if (mean_constraint && mean_constraint->size() != a.rows()) throw InvalidArgument("constraint length mismatch");
  SparseOperator m = mean_constraint ? bordered(a, *mean_constraint) : a;
  m.makeCompressed();
  const bool reuse = impl_->analyzed && same_pattern(m, impl_->matrix);
  // The backend keeps referring to the factorized matrix, so it must live in impl_.
  impl_->matrix = std::move(m);
  if (!reuse) {
    impl_->lu.analyzePattern(impl_->matrix);
    impl_->analyzed = true;
  }
  impl_->lu.factorize(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success) {
    impl_->matrix = SparseOperator();
    impl_->analyzed = false;
    throw SolveError("sparse LU failed: singular or numerically degenerate matrix (pivot failure)");
  }
  impl_->matrix_norm = norm_inf(impl_->matrix);
  impl_->bordered = mean_constraint != nullptr;
}

Solution SparseLu::solve_detailed(const Vector& b) const {
  if (!ready()) throw SolveError("solve called before a successful factorization");
  const std::int64_t n = size();
  if (b.size() != n) throw InvalidArgument("right-hand side length mismatch");
  Vector rhs = b;
  if (impl_->bordered) {
    rhs.conservativeResize(n + 1);
    rhs[n] = 0.0;
  }
  const double bnorm = rhs.norm();
  Solution out;
  if (bnorm == 0.0) {
    out.x = Vector::Zero(n);
    return out;
  }
  Vector x = impl_->lu.solve(rhs);
  Vector r = rhs - impl_->matrix * x;
  auto contract_met = [&](const Vector& xx, const Vector& rr) {
    if (rr.norm() <= opts_.rtol * bnorm) return true;
    return rr.lpNorm<Eigen::Infinity>() <=
           opts_.rtol * (impl_->matrix_norm * xx.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>());
  };
  int k = 0;
  while (!contract_met(x, r) && k < opts_.max_refinements) {
    x += impl_->lu.solve(r);
    r = rhs - impl_->matrix * x;
    ++k;
  }
  if (!x.allFinite()) throw SolveError("sparse LU produced non-finite values (singular system)");
  if (!contract_met(x, r)) {
    throw SolveError("residual contract violated after refinement: ||r|| = " + std::to_string(r.norm()) +
                     ", ||b|| = " + std::to_string(bnorm));
  }
  out.residual = r.norm();
  out.refinements = k;
  out.x = x.head(n);
  return out;
}

Vector solve(const LinearSystem& sys, const SolveOptions& opts) {
  if (sys.rhs.size() != sys.matrix.rows()) throw InvalidArgument("right-hand side length mismatch");
  SparseLu lu(sys.matrix, sys.mean_constraint ? &*sys.mean_constraint : nullptr, opts);
  return lu.solve(sys.rhs);
}

const char* direct_solver_backend() {
#ifdef CHNS_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

}  // namespace chns
