#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

#include "chns/parallel.hpp"

namespace chns {

using Vector = Eigen::VectorXd;

/// Assembled bilinear form. Column-major compressed storage.
using SparseOperator = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Fixed sparsity pattern of an element-loop assembly together with the
/// position of every element-local entry in the compressed value array.
///
/// Assembly adds element blocks in element order regardless of how many
/// threads computed them, so results are bitwise reproducible.
class ScatterPattern {
public:
  ScatterPattern() = default;

  /// row_dofs holds n_elements * rows_per_element indices (and likewise cols).
  ScatterPattern(std::int64_t n_rows, std::int64_t n_cols, int rows_per_element, int cols_per_element,
                 const std::vector<std::int64_t>& row_dofs, const std::vector<std::int64_t>& col_dofs);

  std::int64_t n_elements() const noexcept { return n_elements_; }
  int local_rows() const noexcept { return local_rows_; }
  int local_cols() const noexcept { return local_cols_; }
  const SparseOperator& pattern() const noexcept { return pattern_; }

  /// kernel(e, local) fills the row-major local block of element e; the
  /// buffer arrives zeroed. Must be safe to call concurrently.
  template <typename Kernel>
  SparseOperator assemble(Kernel&& kernel) const {
    SparseOperator a = pattern_;
    double* values = a.valuePtr();
    const int block = local_rows_ * local_cols_;
    const std::size_t nb = static_cast<std::size_t>(block);
    if (thread_count() <= 1) {
      std::vector<double> local(nb);
      for (std::int64_t e = 0; e < n_elements_; ++e) {
        std::fill(local.begin(), local.end(), 0.0);
        kernel(e, local.data());
        const auto* pos = &positions_[static_cast<std::size_t>(e) * nb];
        for (int k = 0; k < block; ++k) values[pos[k]] += local[static_cast<std::size_t>(k)];
      }
      return a;
    }
    std::vector<double> buffer(static_cast<std::size_t>(n_elements_) * nb, 0.0);
    parallel_chunks(n_elements_, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i) kernel(i, &buffer[static_cast<std::size_t>(i) * nb]);
    });
    for (std::size_t k = 0; k < buffer.size(); ++k) values[positions_[k]] += buffer[k];
    return a;
  }

private:
  std::int64_t n_elements_ = 0;
  int local_rows_ = 0;
  int local_cols_ = 0;
  SparseOperator pattern_;
  std::vector<int> positions_;
};

/// [[a, 0], [0, a]].
SparseOperator block_diagonal2(const SparseOperator& a);

/// Places each block at its (row, col) offset in an n_rows x n_cols operator.
struct Block {
  const SparseOperator* op;
  std::int64_t row;
  std::int64_t col;
  double scale = 1.0;
  bool transpose = false;
};
SparseOperator compose_blocks(std::int64_t n_rows, std::int64_t n_cols, const std::vector<Block>& blocks);

/// Fixed block layout whose values can be refilled cheaply. Each block must
/// keep the exact sparsity pattern of the operator given at construction.
class BlockComposer {
public:
  BlockComposer() = default;
  BlockComposer(std::int64_t n_rows, std::int64_t n_cols, const std::vector<Block>& layout);

  /// ops[i] replaces layout[i].op (same pattern); scale and transpose are
  /// taken from the layout unless scales is given.
  SparseOperator compose(const std::vector<const SparseOperator*>& ops, const std::vector<double>& scales = {}) const;
  const SparseOperator& pattern() const noexcept { return pattern_; }

private:
  std::vector<Block> layout_;
  std::vector<std::vector<int>> positions_;
  SparseOperator pattern_;
};

/// Zeroes every flagged row and puts 1 on its diagonal (Dirichlet rows by
/// row replacement). The diagonal must be in the pattern.
void replace_rows_with_identity(SparseOperator& a, const std::vector<char>& row_flag);

/// Max-row-sum norm.
double norm_inf(const SparseOperator& a);

}  // namespace chns
