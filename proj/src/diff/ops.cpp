// SPDX-License-Identifier: Apache-2.0
#include "hetnas/diff/ops.hpp"

#include "hetnas/errors.hpp"

#include <cmath>
#include <string>

namespace hetnas::diff {

namespace {

Tensor result(const char* op, Matrix value, bool needs_grad) {
  require_finite(value, op);
  return Tensor::make_result(std::move(value), needs_grad);
}

void accumulate(Tensor t, const Matrix& g) {
  if (!t.requires_grad()) return;
  require_finite(g, "backward pass");
  t.grad_buffer() += g;
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.value()) + " vs " +
                         shape_string(b.value()));
  }
}

void require_column(const char* op, const Tensor& c, Index rows) {
  if (c.cols() != 1 || c.rows() != rows) {
    throw DimensionError(std::string(op) + ": expected a " + std::to_string(rows) +
                         "x1 column, got " + shape_string(c.value()));
  }
}

void require_edges(const char* op, const SparseMatrix& pattern, const Tensor& e) {
  if (e.cols() != 1 || static_cast<std::size_t>(e.rows()) != pattern.nnz()) {
    throw DimensionError(std::string(op) + ": expected " + std::to_string(pattern.nnz()) +
                         "x1 edge values, got " + shape_string(e.value()));
  }
}

void require_spmm_shapes(const SparseMatrix& s, const Tensor& x) {
  if (s.cols() != x.rows()) {
    throw DimensionError("sparse_dense_matmul: sparse " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()) + " times dense " + shape_string(x.value()));
  }
}

// dX += S^T G using values `vals` aligned with the pattern.
void spmm_backward_x(const SparseMatrix& s, const std::vector<double>& vals, const Matrix& g,
                     Matrix& dx) {
  const auto& offsets = s.offsets();
  const auto& indices = s.indices();
  for (Index r = 0; r < s.rows(); ++r) {
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
      dx.row(indices[k]).noalias() += vals[k] * g.row(r);
    }
  }
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("dense_matmul: inner dimensions differ, " + shape_string(a.value()) +
                         " x " + shape_string(b.value()));
  }
  const bool needs = a.requires_grad() || b.requires_grad();
  Matrix v = a.value() * b.value();
  Tensor out = result("dense_matmul", std::move(v), needs);
  if (needs) {
    tape.record("dense_matmul", out, [a, b](const Matrix& g) {
      if (a.requires_grad()) accumulate(a, g * b.value().transpose());
      if (b.requires_grad()) accumulate(b, a.value().transpose() * g);
    });
  }
  return out;
}

Tensor spmm(Tape& tape, const SparseMatrix& s, const Tensor& x) {
  require_spmm_shapes(s, x);
  const bool needs = x.requires_grad();
  Tensor out = result("sparse_dense_matmul", sparse_times_dense(s, x.value()), needs);
  if (needs) {
    tape.record("sparse_dense_matmul", out, [&s, x](const Matrix& g) {
      Matrix dx = Matrix::Zero(x.rows(), x.cols());
      spmm_backward_x(s, s.values(), g, dx);
      accumulate(x, dx);
    });
  }
  return out;
}

Tensor spmm(Tape& tape, const SparseMatrix& pattern, const Tensor& edge_values, const Tensor& x) {
  require_spmm_shapes(pattern, x);
  require_edges("sparse_dense_matmul", pattern, edge_values);
  const auto& offsets = pattern.offsets();
  const auto& indices = pattern.indices();
  const Matrix& ev = edge_values.value();
  const Matrix& xv = x.value();
  Matrix v = Matrix::Zero(pattern.rows(), x.cols());
  for (Index r = 0; r < pattern.rows(); ++r) {
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
      v.row(r).noalias() += ev(k, 0) * xv.row(indices[k]);
    }
  }
  const bool needs = x.requires_grad() || edge_values.requires_grad();
  Tensor out = result("sparse_dense_matmul", std::move(v), needs);
  if (needs) {
    tape.record("sparse_dense_matmul", out, [&pattern, edge_values, x](const Matrix& g) {
      const auto& offsets = pattern.offsets();
      const auto& indices = pattern.indices();
      const Matrix& ev = edge_values.value();
      if (x.requires_grad()) {
        Matrix dx = Matrix::Zero(x.rows(), x.cols());
        for (Index r = 0; r < pattern.rows(); ++r) {
          for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
            dx.row(indices[k]).noalias() += ev(k, 0) * g.row(r);
          }
        }
        accumulate(x, dx);
      }
      if (edge_values.requires_grad()) {
        const Matrix& xv = x.value();
        Matrix de(ev.rows(), 1);
        for (Index r = 0; r < pattern.rows(); ++r) {
          for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
            de(k, 0) = g.row(r).dot(xv.row(indices[k]));
          }
        }
        accumulate(edge_values, de);
      }
    });
  }
  return out;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  const bool needs = a.requires_grad() || b.requires_grad();
  Tensor out = result("add", a.value() + b.value(), needs);
  if (needs) {
    tape.record("add", out, [a, b](const Matrix& g) {
      accumulate(a, g);
      accumulate(b, g);
    });
  }
  return out;
}

Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  const bool needs = a.requires_grad() || b.requires_grad();
  Tensor out = result("sub", a.value() - b.value(), needs);
  if (needs) {
    tape.record("sub", out, [a, b](const Matrix& g) {
      accumulate(a, g);
      if (b.requires_grad()) accumulate(b, -g);
    });
  }
  return out;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  const bool needs = a.requires_grad() || b.requires_grad();
  Tensor out = result("mul", a.value().cwiseProduct(b.value()), needs);
  if (needs) {
    tape.record("mul", out, [a, b](const Matrix& g) {
      if (a.requires_grad()) accumulate(a, g.cwiseProduct(b.value()));
      if (b.requires_grad()) accumulate(b, g.cwiseProduct(a.value()));
    });
  }
  return out;
}

Tensor scale(Tape& tape, const Tensor& a, double factor) { return affine(tape, a, factor, 0.0); }

Tensor affine(Tape& tape, const Tensor& a, double factor, double offset) {
  const bool needs = a.requires_grad();
  Matrix v = (a.value() * factor).array() + offset;
  Tensor out = result("affine", std::move(v), needs);
  if (needs) {
    tape.record("affine", out, [a, factor](const Matrix& g) { accumulate(a, g * factor); });
  }
  return out;
}

Tensor relu(Tape& tape, const Tensor& a) {
  const bool needs = a.requires_grad();
  Tensor out = result("relu", a.value().cwiseMax(0.0), needs);
  if (needs) {
    tape.record("relu", out, [a](const Matrix& g) {
      accumulate(a, (a.value().array() > 0.0).select(g, 0.0));
    });
  }
  return out;
}

Tensor tanh(Tape& tape, const Tensor& a) {
  const bool needs = a.requires_grad();
  Tensor out = result("tanh", a.value().array().tanh().matrix(), needs);
  if (needs) {
    tape.record("tanh", out, [a, out](const Matrix& g) {
      const auto& y = out.value().array();
      accumulate(a, (g.array() * (1.0 - y * y)).matrix());
    });
  }
  return out;
}

Tensor sigmoid(Tape& tape, const Tensor& a) {
  const bool needs = a.requires_grad();
  Matrix v = a.value().unaryExpr([](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  Tensor out = result("sigmoid", std::move(v), needs);
  if (needs) {
    tape.record("sigmoid", out, [a, out](const Matrix& g) {
      const auto& y = out.value().array();
      accumulate(a, (g.array() * y * (1.0 - y)).matrix());
    });
  }
  return out;
}

Tensor add_row_bias(Tape& tape, const Tensor& x, const Tensor& bias) {
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw DimensionError("add_row_bias: bias " + shape_string(bias.value()) + " for input " +
                         shape_string(x.value()));
  }
  const bool needs = x.requires_grad() || bias.requires_grad();
  Matrix v = x.value().rowwise() + bias.value().row(0);
  Tensor out = result("add_row_bias", std::move(v), needs);
  if (needs) {
    tape.record("add_row_bias", out, [x, bias](const Matrix& g) {
      accumulate(x, g);
      if (bias.requires_grad()) accumulate(bias, g.colwise().sum());
    });
  }
  return out;
}

Tensor scale_rows(Tape& tape, const Tensor& x, const Tensor& column) {
  require_column("scale_rows", column, x.rows());
  const bool needs = x.requires_grad() || column.requires_grad();
  Matrix v = x.value().array().colwise() * column.value().col(0).array();
  Tensor out = result("scale_rows", std::move(v), needs);
  if (needs) {
    tape.record("scale_rows", out, [x, column](const Matrix& g) {
      if (x.requires_grad()) {
        accumulate(x, (g.array().colwise() * column.value().col(0).array()).matrix());
      }
      if (column.requires_grad()) {
        accumulate(column, g.cwiseProduct(x.value()).rowwise().sum());
      }
    });
  }
  return out;
}

Tensor scale_by(Tape& tape, const Tensor& x, const Tensor& s) {
  if (!s.is_scalar()) {
    throw DimensionError("scale_by: expected a 1x1 factor, got " + shape_string(s.value()));
  }
  const bool needs = x.requires_grad() || s.requires_grad();
  Tensor out = result("scale_by", x.value() * s.item(), needs);
  if (needs) {
    tape.record("scale_by", out, [x, s](const Matrix& g) {
      if (x.requires_grad()) accumulate(x, g * s.item());
      if (s.requires_grad()) {
        Matrix ds(1, 1);
        ds(0, 0) = g.cwiseProduct(x.value()).sum();
        accumulate(s, ds);
      }
    });
  }
  return out;
}

Tensor concat_cols(Tape& tape, std::span<const Tensor> parts) {
  if (parts.empty()) {
    throw DimensionError("concat_cols: no inputs");
  }
  const Index rows = parts.front().rows();
  Index cols = 0;
  bool needs = false;
  for (const auto& p : parts) {
    if (p.rows() != rows) {
      throw DimensionError("concat_cols: row mismatch " + shape_string(parts.front().value()) +
                           " vs " + shape_string(p.value()));
    }
    cols += p.cols();
    needs = needs || p.requires_grad();
  }
  Matrix v(rows, cols);
  Index at = 0;
  for (const auto& p : parts) {
    v.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  Tensor out = result("concat_cols", std::move(v), needs);
  if (needs) {
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    tape.record("concat_cols", out, [inputs](const Matrix& g) {
      Index at = 0;
      for (const auto& p : inputs) {
        if (p.requires_grad()) accumulate(p, g.middleCols(at, p.cols()));
        at += p.cols();
      }
    });
  }
  return out;
}

Tensor slice_cols(Tape& tape, const Tensor& a, Index begin, Index count) {
  if (begin < 0 || count < 0 || begin + count > a.cols()) {
    throw DimensionError("slice_cols: columns [" + std::to_string(begin) + "," +
                         std::to_string(begin + count) + ") outside " + shape_string(a.value()));
  }
  const bool needs = a.requires_grad();
  Tensor out = result("slice_cols", a.value().middleCols(begin, count), needs);
  if (needs) {
    tape.record("slice_cols", out, [a, begin, count](const Matrix& g) {
      Tensor target = a;
      target.grad_buffer().middleCols(begin, count) += g;
    });
  }
  return out;
}

Tensor gather_rows(Tape& tape, const Tensor& a, std::span<const int> rows) {
  Matrix v(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) {
      throw DimensionError("gather_rows: index " + std::to_string(rows[i]) + " outside " +
                           shape_string(a.value()));
    }
    v.row(static_cast<Index>(i)) = a.value().row(rows[i]);
  }
  const bool needs = a.requires_grad();
  Tensor out = result("gather_rows", std::move(v), needs);
  if (needs) {
    std::vector<int> idx(rows.begin(), rows.end());
    tape.record("gather_rows", out, [a, idx](const Matrix& g) {
      Tensor target = a;
      Matrix& buf = target.grad_buffer();
      for (std::size_t i = 0; i < idx.size(); ++i) buf.row(idx[i]) += g.row(static_cast<Index>(i));
    });
  }
  return out;
}

Tensor scatter_rows(Tape& tape, const Tensor& a, std::span<const int> rows, Index num_rows) {
  if (static_cast<Index>(rows.size()) != a.rows()) {
    throw DimensionError("scatter_rows: " + std::to_string(rows.size()) + " indices for " +
                         shape_string(a.value()));
  }
  Matrix v = Matrix::Zero(num_rows, a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= num_rows) {
      throw DimensionError("scatter_rows: index " + std::to_string(rows[i]) + " outside " +
                           std::to_string(num_rows) + " rows");
    }
    v.row(rows[i]) += a.value().row(static_cast<Index>(i));
  }
  const bool needs = a.requires_grad();
  Tensor out = result("scatter_rows", std::move(v), needs);
  if (needs) {
    std::vector<int> idx(rows.begin(), rows.end());
    tape.record("scatter_rows", out, [a, idx](const Matrix& g) {
      Matrix da(a.rows(), a.cols());
      for (std::size_t i = 0; i < idx.size(); ++i) da.row(static_cast<Index>(i)) = g.row(idx[i]);
      accumulate(a, da);
    });
  }
  return out;
}

Tensor row_sum(Tape& tape, const Tensor& a) {
  const bool needs = a.requires_grad();
  Tensor out = result("row_sum", a.value().rowwise().sum(), needs);
  if (needs) {
    tape.record("row_sum", out, [a](const Matrix& g) {
      accumulate(a, g.col(0).replicate(1, a.cols()));
    });
  }
  return out;
}

Tensor row_mean(Tape& tape, const Tensor& a) {
  if (a.cols() == 0) throw DimensionError("row_mean over zero columns");
  return scale(tape, row_sum(tape, a), 1.0 / static_cast<double>(a.cols()));
}

Tensor sum(Tape& tape, const Tensor& a) {
  const bool needs = a.requires_grad();
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  Tensor out = result("sum", std::move(v), needs);
  if (needs) {
    tape.record("sum", out, [a](const Matrix& g) {
      accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
    });
  }
  return out;
}

Tensor edge_sum(Tape& tape, const SparseMatrix& pattern, const Tensor& p, const Tensor& q) {
  require_column("edge_sum", p, pattern.rows());
  require_column("edge_sum", q, pattern.cols());
  const auto& offsets = pattern.offsets();
  const auto& indices = pattern.indices();
  Matrix v(static_cast<Index>(pattern.nnz()), 1);
  for (Index r = 0; r < pattern.rows(); ++r) {
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
      v(k, 0) = p.value()(r, 0) + q.value()(indices[k], 0);
    }
  }
  const bool needs = p.requires_grad() || q.requires_grad();
  Tensor out = result("edge_sum", std::move(v), needs);
  if (needs) {
    tape.record("edge_sum", out, [&pattern, p, q](const Matrix& g) {
      const auto& offsets = pattern.offsets();
      const auto& indices = pattern.indices();
      Matrix dp = Matrix::Zero(p.rows(), 1);
      Matrix dq = Matrix::Zero(q.rows(), 1);
      for (Index r = 0; r < pattern.rows(); ++r) {
        for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
          dp(r, 0) += g(k, 0);
          dq(indices[k], 0) += g(k, 0);
        }
      }
      accumulate(p, dp);
      accumulate(q, dq);
    });
  }
  return out;
}

Tensor edge_dot(Tape& tape, const SparseMatrix& pattern, const Tensor& a, const Tensor& b) {
  if (a.rows() != pattern.rows() || b.rows() != pattern.cols() || a.cols() != b.cols()) {
    throw DimensionError("edge_dot: operands " + shape_string(a.value()) + ", " +
                         shape_string(b.value()) + " do not fit the edge pattern");
  }
  const auto& offsets = pattern.offsets();
  const auto& indices = pattern.indices();
  Matrix v(static_cast<Index>(pattern.nnz()), 1);
  for (Index r = 0; r < pattern.rows(); ++r) {
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
      v(k, 0) = a.value().row(r).dot(b.value().row(indices[k]));
    }
  }
  const bool needs = a.requires_grad() || b.requires_grad();
  Tensor out = result("edge_dot", std::move(v), needs);
  if (needs) {
    tape.record("edge_dot", out, [&pattern, a, b](const Matrix& g) {
      const auto& offsets = pattern.offsets();
      const auto& indices = pattern.indices();
      Matrix da = Matrix::Zero(a.rows(), a.cols());
      Matrix db = Matrix::Zero(b.rows(), b.cols());
      for (Index r = 0; r < pattern.rows(); ++r) {
        for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
          da.row(r).noalias() += g(k, 0) * b.value().row(indices[k]);
          db.row(indices[k]).noalias() += g(k, 0) * a.value().row(r);
        }
      }
      accumulate(a, da);
      accumulate(b, db);
    });
  }
  return out;
}

Tensor edge_from_rows(Tape& tape, const SparseMatrix& pattern, const Tensor& column) {
  require_column("edge_from_rows", column, pattern.rows());
  const auto& offsets = pattern.offsets();
  Matrix v(static_cast<Index>(pattern.nnz()), 1);
  for (Index r = 0; r < pattern.rows(); ++r) {
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) v(k, 0) = column.value()(r, 0);
  }
  const bool needs = column.requires_grad();
  Tensor out = result("edge_from_rows", std::move(v), needs);
  if (needs) {
    tape.record("edge_from_rows", out, [&pattern, column](const Matrix& g) {
      const auto& offsets = pattern.offsets();
      Matrix dc = Matrix::Zero(column.rows(), 1);
      for (Index r = 0; r < pattern.rows(); ++r) {
        for (auto k = offsets[r]; k < offsets[r + 1]; ++k) dc(r, 0) += g(k, 0);
      }
      accumulate(column, dc);
    });
  }
  return out;
}

Tensor row_normalize(Tape& tape, const Tensor& a, double eps) {
  const Eigen::VectorXd norms = (a.value().rowwise().squaredNorm().array() + eps).sqrt();
  Matrix v = a.value().array().colwise() / norms.array();
  const bool needs = a.requires_grad();
  Tensor out = result("row_normalize", std::move(v), needs);
  if (needs) {
    tape.record("row_normalize", out, [a, norms](const Matrix& g) {
      const Matrix& x = a.value();
      const Eigen::VectorXd xg = x.cwiseProduct(g).rowwise().sum();
      const Eigen::VectorXd s3 = norms.array().cube();
      Matrix da = (g.array().colwise() / norms.array()) -
                  (x.array().colwise() * (xg.array() / s3.array()));
      accumulate(a, da);
    });
  }
  return out;
}

Tensor dropout(Tape& tape, const Tensor& x, double p, bool train, std::mt19937_64& rng) {
  if (p < 0.0 || p >= 1.0) {
    throw ParameterError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
  if (!train || p == 0.0) return x;
  // Keep when a raw 64-bit draw falls below (1 - p) * 2^64.
  const double cut = std::ldexp(1.0 - p, 64);
  const auto threshold = cut >= 0x1p64 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(cut);
  const double inv = 1.0 / (1.0 - p);
  Matrix mask(x.rows(), x.cols());
  for (Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng() < threshold ? inv : 0.0;
  const bool needs = x.requires_grad();
  Tensor out = result("dropout", x.value().cwiseProduct(mask), needs);
  if (needs) {
    tape.record("dropout", out, [x, mask](const Matrix& g) { accumulate(x, g.cwiseProduct(mask)); });
  }
  return out;
}

Tensor softmax_temperature(Tape& tape, const Tensor& logits, double tau) {
  if (!(tau > 0.0)) {
    throw ParameterError("softmax temperature must be positive, got " + std::to_string(tau));
  }
  Matrix v = logits.value() / tau;
  for (Index r = 0; r < v.rows(); ++r) {
    auto row = v.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
  const bool needs = logits.requires_grad();
  Tensor out = result("softmax_temperature", std::move(v), needs);
  if (needs) {
    tape.record("softmax_temperature", out, [logits, out, tau](const Matrix& g) {
      const Matrix& y = out.value();
      const Eigen::VectorXd gy = g.cwiseProduct(y).rowwise().sum();
      Matrix dx = y.cwiseProduct(g.colwise() - gy) / tau;
      accumulate(logits, dx);
    });
  }
  return out;
}

Tensor straight_through_argmax(Tape& tape, const Tensor& probs) {
  Matrix v = Matrix::Zero(probs.rows(), probs.cols());
  for (Index r = 0; r < v.rows(); ++r) {
    Index best = 0;
    for (Index c = 1; c < v.cols(); ++c) {
      if (probs.value()(r, c) > probs.value()(r, best)) best = c;
    }
    if (v.cols() > 0) v(r, best) = 1.0;
  }
  const bool needs = probs.requires_grad();
  Tensor out = result("straight_through_argmax", std::move(v), needs);
  if (needs) {
    tape.record("straight_through_argmax", out, [probs](const Matrix& g) { accumulate(probs, g); });
  }
  return out;
}

Tensor cross_entropy_mean(Tape& tape, const Tensor& logits, std::span<const int> labels,
                          std::span<const int> mask) {
  if (mask.empty()) {
    throw ParameterError("cross_entropy_mean: empty node mask");
  }
  if (static_cast<Index>(labels.size()) != logits.rows()) {
    throw DimensionError("cross_entropy_mean: " + std::to_string(labels.size()) +
                         " labels for logits " + shape_string(logits.value()));
  }
  const Matrix& x = logits.value();
  const Index classes = x.cols();
  Matrix probs(static_cast<Index>(mask.size()), classes);
  double total = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const int node = mask[i];
    if (node < 0 || node >= x.rows()) {
      throw DimensionError("cross_entropy_mean: mask index " + std::to_string(node) +
                           " outside logits " + shape_string(x));
    }
    const int label = labels[node];
    if (label < 0 || label >= classes) {
      throw ParameterError("cross_entropy_mean: label " + std::to_string(label) + " of node " +
                           std::to_string(node) + " outside [0, " + std::to_string(classes) + ")");
    }
    const double mx = x.row(node).maxCoeff();
    const auto shifted = (x.row(node).array() - mx).exp();
    const double z = shifted.sum();
    total += mx + std::log(z) - x(node, label);
    probs.row(static_cast<Index>(i)) = shifted / z;
  }
  Matrix v(1, 1);
  v(0, 0) = total / static_cast<double>(mask.size());
  const bool needs = logits.requires_grad();
  Tensor out = result("cross_entropy_mean", std::move(v), needs);
  if (needs) {
    std::vector<int> idx(mask.begin(), mask.end());
    std::vector<int> lab(labels.begin(), labels.end());
    tape.record("cross_entropy_mean", out, [logits, idx, lab, probs](const Matrix& g) {
      const double w = g(0, 0) / static_cast<double>(idx.size());
      Matrix dx = Matrix::Zero(logits.rows(), logits.cols());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        dx.row(idx[i]) += w * probs.row(static_cast<Index>(i));
        dx(idx[i], lab[idx[i]]) -= w;
      }
      accumulate(logits, dx);
    });
  }
  return out;
}

}  // namespace hetnas::diff
