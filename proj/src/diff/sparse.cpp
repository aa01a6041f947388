// SPDX-License-Identifier: Apache-2.0
#include "hetnas/diff/sparse.hpp"

#include "hetnas/errors.hpp"

#include <algorithm>
#include <string>

namespace hetnas::diff {

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<std::int64_t> offsets,
                           std::vector<std::int32_t> indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      offsets_(std::move(offsets)),
      indices_(std::move(indices)),
      values_(std::move(values)) {
  validate();
}

void SparseMatrix::validate() const {
  if (rows_ < 0 || cols_ < 0) {
    throw DimensionError("sparse matrix with negative shape");
  }
  if (offsets_.size() != static_cast<std::size_t>(rows_) + 1 || offsets_.front() != 0) {
    throw DimensionError("invalid CSR offsets: expected rows+1 entries starting at 0");
  }
  if (values_.size() != indices_.size() ||
      offsets_.back() != static_cast<std::int64_t>(indices_.size())) {
    throw DimensionError("invalid CSR structure: nnz does not match offsets[rows]");
  }
  for (Index r = 0; r < rows_; ++r) {
    if (offsets_[r + 1] < offsets_[r]) {
      throw DimensionError("invalid CSR offsets: not monotone at row " + std::to_string(r));
    }
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      const auto c = indices_[k];
      if (c < 0 || c >= cols_) {
        throw DimensionError("CSR column index " + std::to_string(c) + " out of range in row " +
                             std::to_string(r));
      }
      if (k > offsets_[r] && indices_[k - 1] >= c) {
        throw DimensionError("CSR column indices not strictly increasing in row " +
                             std::to_string(r));
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(
    Index rows, Index cols, std::vector<std::tuple<std::int32_t, std::int32_t, double>> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  indices.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto [r, c, v] = triplets[i];
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw DimensionError("triplet (" + std::to_string(r) + "," + std::to_string(c) +
                           ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (i > 0 && std::get<0>(triplets[i - 1]) == r && std::get<1>(triplets[i - 1]) == c) {
      values.back() += v;
      continue;
    }
    indices.push_back(c);
    values.push_back(v);
    ++offsets[static_cast<std::size_t>(r) + 1];
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r) {
    offsets[r + 1] += offsets[r];
  }
  return SparseMatrix(rows, cols, std::move(offsets), std::move(indices), std::move(values));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(n) + 1);
  std::vector<std::int32_t> indices(static_cast<std::size_t>(n));
  for (Index i = 0; i <= n; ++i) offsets[i] = i;
  for (Index i = 0; i < n; ++i) indices[i] = static_cast<std::int32_t>(i);
  return SparseMatrix(n, n, std::move(offsets), std::move(indices),
                      std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

SparseMatrix SparseMatrix::from_dense(const Matrix& dense) {
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(dense.rows()) + 1, 0);
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  for (Index r = 0; r < dense.rows(); ++r) {
    for (Index c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        indices.push_back(static_cast<std::int32_t>(c));
        values.push_back(dense(r, c));
      }
    }
    offsets[r + 1] = static_cast<std::int64_t>(indices.size());
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(offsets), std::move(indices),
                      std::move(values));
}

std::vector<std::int32_t> SparseMatrix::entry_rows() const {
  std::vector<std::int32_t> rows(nnz());
  for (Index r = 0; r < rows_; ++r) {
    std::fill(rows.begin() + offsets_[r], rows.begin() + offsets_[r + 1],
              static_cast<std::int32_t>(r));
  }
  return rows;
}

SparseMatrix SparseMatrix::with_values(std::vector<double> values) const {
  if (values.size() != nnz()) {
    throw DimensionError("with_values: expected " + std::to_string(nnz()) + " values, got " +
                         std::to_string(values.size()));
  }
  SparseMatrix out = *this;
  out.values_ = std::move(values);
  return out;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(cols_) + 1, 0);
  for (auto c : indices_) ++offsets[static_cast<std::size_t>(c) + 1];
  for (Index c = 0; c < cols_; ++c) offsets[c + 1] += offsets[c];
  std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<std::int32_t> indices(nnz());
  std::vector<double> values(nnz());
  for (Index r = 0; r < rows_; ++r) {
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      const auto dst = cursor[indices_[k]]++;
      indices[dst] = static_cast<std::int32_t>(r);
      values[dst] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(indices), std::move(values));
}

Matrix SparseMatrix::to_dense() const {
  Matrix out = Matrix::Zero(rows_, cols_);
  for (Index r = 0; r < rows_; ++r) {
    for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      out(r, indices_[k]) += values_[k];
    }
  }
  return out;
}

Matrix sparse_times_dense(const SparseMatrix& s, const Matrix& x) {
  if (s.cols() != x.rows()) {
    throw DimensionError("sparse_dense_matmul: " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()) + " times " + shape_string(x));
  }
  Matrix out = Matrix::Zero(s.rows(), x.cols());
  const auto& offsets = s.offsets();
  const auto& indices = s.indices();
  const auto& values = s.values();
  for (Index r = 0; r < s.rows(); ++r) {
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
      out.row(r).noalias() += values[k] * x.row(indices[k]);
    }
  }
  return out;
}

}  // namespace hetnas::diff
