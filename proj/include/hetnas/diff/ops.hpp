// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/diff/sparse.hpp"
#include "hetnas/diff/tape.hpp"
#include "hetnas/diff/tensor.hpp"

#include <random>
#include <span>
#include <vector>

// Differentiable op catalog. Every op validates shapes, checks its output
// for non-finite values, and records a backward rule on the tape when the
// output requires a gradient. Sparse operands are held by reference and must
// outlive the tape's backward pass.

namespace hetnas::diff {

// --- linear algebra -------------------------------------------------------

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);

/// s * x using the stored values of `s` (constant edge weights).
Tensor spmm(Tape& tape, const SparseMatrix& s, const Tensor& x);

/// s * x where the edge values come from `edge_values` (nnz x 1), which may
/// require a gradient. The stored values of `s` are ignored.
Tensor spmm(Tape& tape, const SparseMatrix& pattern, const Tensor& edge_values, const Tensor& x);

// --- elementwise ----------------------------------------------------------

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, double factor);
/// factor * a + offset
Tensor affine(Tape& tape, const Tensor& a, double factor, double offset);
Tensor relu(Tape& tape, const Tensor& a);
Tensor tanh(Tape& tape, const Tensor& a);
Tensor sigmoid(Tape& tape, const Tensor& a);

/// Adds a 1 x cols bias to every row.
Tensor add_row_bias(Tape& tape, const Tensor& x, const Tensor& bias);
/// Multiplies row i of x by column(i) (column is rows x 1).
Tensor scale_rows(Tape& tape, const Tensor& x, const Tensor& column);
/// Multiplies every entry by the 1 x 1 tensor `s`.
Tensor scale_by(Tape& tape, const Tensor& x, const Tensor& s);

// --- shape ----------------------------------------------------------------

/// Concatenation along the feature (column) axis.
Tensor concat_cols(Tape& tape, std::span<const Tensor> parts);
Tensor slice_cols(Tape& tape, const Tensor& a, Index begin, Index count);
Tensor gather_rows(Tape& tape, const Tensor& a, std::span<const int> rows);
/// Scatter-adds the rows of a into a zero matrix with `num_rows` rows.
Tensor scatter_rows(Tape& tape, const Tensor& a, std::span<const int> rows, Index num_rows);

// --- reductions -----------------------------------------------------------

Tensor row_sum(Tape& tape, const Tensor& a);
Tensor row_mean(Tape& tape, const Tensor& a);
Tensor sum(Tape& tape, const Tensor& a);

// --- graph edge ops (values aligned with the pattern's storage order) -----

/// e(u,v) = p(u) + q(v) for p, q of shape rows x 1.
Tensor edge_sum(Tape& tape, const SparseMatrix& pattern, const Tensor& p, const Tensor& q);
/// e(u,v) = <a(u,:), b(v,:)>.
Tensor edge_dot(Tape& tape, const SparseMatrix& pattern, const Tensor& a, const Tensor& b);
/// e(u,v) = column(u).
Tensor edge_from_rows(Tape& tape, const SparseMatrix& pattern, const Tensor& column);

/// Row i divided by sqrt(|row i|^2 + eps).
Tensor row_normalize(Tape& tape, const Tensor& a, double eps = 1e-12);

// --- learning -------------------------------------------------------------

/// Inverted dropout. In eval mode (train == false) or with p == 0 returns x
/// unchanged. The sampled mask is kept by the backward rule.
Tensor dropout(Tape& tape, const Tensor& x, double p, bool train, std::mt19937_64& rng);

/// Row-wise exp(x / tau) / sum exp(x / tau), max-subtracted.
Tensor softmax_temperature(Tape& tape, const Tensor& logits, double tau);

/// Forward pass is the row-wise one-hot argmax (lowest index on ties); the
/// backward rule passes gradients straight through to `probs`.
Tensor straight_through_argmax(Tape& tape, const Tensor& probs);

/// Mean over `mask` rows of -log softmax(logits)[label].
Tensor cross_entropy_mean(Tape& tape, const Tensor& logits, std::span<const int> labels,
                          std::span<const int> mask);

}  // namespace hetnas::diff
