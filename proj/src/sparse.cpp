#include "chns/sparse.hpp"

#include <algorithm>

#include "chns/error.hpp"

namespace chns {

ScatterPattern::ScatterPattern(std::int64_t n_rows, std::int64_t n_cols, int rows_per_element, int cols_per_element,
                               const std::vector<std::int64_t>& row_dofs, const std::vector<std::int64_t>& col_dofs)
    : local_rows_(rows_per_element), local_cols_(cols_per_element) {
  if (rows_per_element <= 0 || cols_per_element <= 0 || row_dofs.size() % rows_per_element != 0) {
    throw InvalidArgument("bad element dof layout");
  }
  n_elements_ = static_cast<std::int64_t>(row_dofs.size() / rows_per_element);
  if (col_dofs.size() != static_cast<std::size_t>(n_elements_ * cols_per_element)) {
    throw InvalidArgument("row and column dof maps disagree on element count");
  }
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(n_elements_) * rows_per_element * cols_per_element);
  for (std::int64_t e = 0; e < n_elements_; ++e) {
    for (int i = 0; i < rows_per_element; ++i) {
      for (int j = 0; j < cols_per_element; ++j) {
        triplets.emplace_back(static_cast<int>(row_dofs[e * rows_per_element + i]),
                              static_cast<int>(col_dofs[e * cols_per_element + j]), 0.0);
      }
    }
  }
  pattern_.resize(n_rows, n_cols);
  pattern_.setFromTriplets(triplets.begin(), triplets.end());
  pattern_.makeCompressed();

  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  positions_.resize(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const int r = triplets[k].row();
    const int c = triplets[k].col();
    const int* first = inner + outer[c];
    const int* last = inner + outer[c + 1];
    positions_[k] = static_cast<int>(std::lower_bound(first, last, r) - inner);
  }
}

SparseOperator block_diagonal2(const SparseOperator& a) {
  return compose_blocks(2 * a.rows(), 2 * a.cols(), {{&a, 0, 0}, {&a, a.rows(), a.cols()}});
}

SparseOperator compose_blocks(std::int64_t n_rows, std::int64_t n_cols, const std::vector<Block>& blocks) {
  std::vector<Eigen::Triplet<double, int>> triplets;
  std::size_t total = 0;
  for (const auto& b : blocks) total += static_cast<std::size_t>(b.op->nonZeros());
  triplets.reserve(total);
  for (const auto& b : blocks) {
    for (int c = 0; c < b.op->outerSize(); ++c) {
      for (SparseOperator::InnerIterator it(*b.op, c); it; ++it) {
        const std::int64_t r = b.transpose ? it.col() : it.row();
        const std::int64_t cc = b.transpose ? it.row() : it.col();
        triplets.emplace_back(static_cast<int>(b.row + r), static_cast<int>(b.col + cc), b.scale * it.value());
      }
    }
  }
  SparseOperator out(n_rows, n_cols);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

BlockComposer::BlockComposer(std::int64_t n_rows, std::int64_t n_cols, const std::vector<Block>& layout)
    : layout_(layout) {
  pattern_ = compose_blocks(n_rows, n_cols, layout);
  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  for (const auto& b : layout_) {
    std::vector<int> pos;
    pos.reserve(static_cast<std::size_t>(b.op->nonZeros()));
    for (int c = 0; c < b.op->outerSize(); ++c) {
      for (SparseOperator::InnerIterator it(*b.op, c); it; ++it) {
        const int r = static_cast<int>(b.row + (b.transpose ? it.col() : it.row()));
        const int cc = static_cast<int>(b.col + (b.transpose ? it.row() : it.col()));
        const int* first = inner + outer[cc];
        const int* last = inner + outer[cc + 1];
        pos.push_back(static_cast<int>(std::lower_bound(first, last, r) - inner));
      }
    }
    positions_.push_back(std::move(pos));
  }
}

SparseOperator BlockComposer::compose(const std::vector<const SparseOperator*>& ops,
                                      const std::vector<double>& scales) const {
  if (ops.size() != layout_.size() || (!scales.empty() && scales.size() != ops.size())) {
    throw InvalidArgument("block count does not match the layout");
  }
  SparseOperator out = pattern_;
  double* values = out.valuePtr();
  std::fill(values, values + out.nonZeros(), 0.0);
  for (std::size_t b = 0; b < ops.size(); ++b) {
    const SparseOperator& op = *ops[b];
    if (op.nonZeros() != static_cast<Eigen::Index>(positions_[b].size()) || !op.isCompressed()) {
      throw InvalidArgument("block pattern differs from the layout");
    }
    const double s = scales.empty() ? layout_[b].scale : scales[b];
    const double* v = op.valuePtr();
    const auto& pos = positions_[b];
    for (std::size_t k = 0; k < pos.size(); ++k) values[pos[k]] += s * v[k];
  }
  return out;
}

void replace_rows_with_identity(SparseOperator& a, const std::vector<char>& row_flag) {
  if (static_cast<Eigen::Index>(row_flag.size()) != a.rows()) throw InvalidArgument("row flag length mismatch");
  std::vector<char> has_diag(row_flag.size(), 0);
  for (int c = 0; c < a.outerSize(); ++c) {
    for (SparseOperator::InnerIterator it(a, c); it; ++it) {
      if (!row_flag[static_cast<std::size_t>(it.row())]) continue;
      if (it.row() == it.col()) {
        it.valueRef() = 1.0;
        has_diag[static_cast<std::size_t>(it.row())] = 1;
      } else {
        it.valueRef() = 0.0;
      }
    }
  }
  for (std::size_t r = 0; r < row_flag.size(); ++r) {
    if (row_flag[r] && !has_diag[r]) throw InvalidArgument("row replacement needs a structural diagonal");
  }
}

double norm_inf(const SparseOperator& a) {
  Vector rows = Vector::Zero(a.rows());
  for (int c = 0; c < a.outerSize(); ++c) {
    for (SparseOperator::InnerIterator it(a, c); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

}  // namespace chns
