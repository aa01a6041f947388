// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/diff/tensor.hpp"

#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

namespace hetnas::diff {

/// Compressed-sparse-row matrix of doubles.
///
/// Column indices are strictly increasing within each row and
/// offsets.size() == rows + 1. Values may be negative.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<std::int64_t> offsets,
               std::vector<std::int32_t> indices, std::vector<double> values);

  /// Builds from (row, col, value) triplets. Triplets are sorted; duplicate
  /// coordinates are summed.
  static SparseMatrix from_triplets(Index rows, Index cols,
                                    std::vector<std::tuple<std::int32_t, std::int32_t, double>> triplets);
  static SparseMatrix identity(Index n);
  /// Keeps entries whose magnitude exceeds zero.
  static SparseMatrix from_dense(const Matrix& dense);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return indices_.size(); }

  const std::vector<std::int64_t>& offsets() const { return offsets_; }
  const std::vector<std::int32_t>& indices() const { return indices_; }
  const std::vector<double>& values() const { return values_; }

  /// Row index of every stored entry, in storage order.
  std::vector<std::int32_t> entry_rows() const;
  std::size_t row_nnz(Index row) const {
    return static_cast<std::size_t>(offsets_[row + 1] - offsets_[row]);
  }

  /// Same pattern, new values (must have nnz entries).
  SparseMatrix with_values(std::vector<double> values) const;
  SparseMatrix transpose() const;
  Matrix to_dense() const;

  /// Throws DimensionError if the CSR invariants do not hold.
  void validate() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int32_t> indices_;
  std::vector<double> values_;
};

/// out = s * x with s's stored values.
Matrix sparse_times_dense(const SparseMatrix& s, const Matrix& x);

}  // namespace hetnas::diff
