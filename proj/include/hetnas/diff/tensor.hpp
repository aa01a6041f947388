// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <string>

namespace hetnas::diff {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

std::string shape_string(const Matrix& m);

/// Throws NumericalError naming `where` if `m` holds a NaN or Inf.
void require_finite(const Matrix& m, const char* where);

/// Shared handle to a dense matrix and its gradient accumulator.
///
/// Copies alias the same storage. Leaf tensors are either constants or
/// parameters; op outputs are non-leaf and require a gradient whenever
/// any of their inputs does.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Matrix value);
  static Tensor parameter(Matrix value);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  Index rows() const { return impl_->value.rows(); }
  Index cols() const { return impl_->value.cols(); }
  bool is_scalar() const { return rows() == 1 && cols() == 1; }

  const Matrix& value() const { return impl_->value; }
  double item() const;

  /// Direct write access for optimizers and checkpoint restore; the
  /// shape must not change.
  Matrix& mutable_value() { return impl_->value; }

  bool requires_grad() const { return impl_->requires_grad; }
  bool is_leaf() const { return impl_->leaf; }

  bool has_grad() const { return impl_->grad.size() != 0; }
  /// Gradient, or an empty matrix when none has been accumulated.
  const Matrix& grad() const { return impl_->grad; }
  /// Gradient accumulator, zero-initialised on first access.
  Matrix& grad_buffer();
  void zero_grad() { impl_->grad.resize(0, 0); }

  const void* id() const { return impl_.get(); }

  /// Non-leaf result of an op. Only for use by op implementations.
  static Tensor make_result(Matrix value, bool requires_grad);

 private:
  struct Impl {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool leaf = true;
  };
  std::shared_ptr<Impl> impl_;
};

}  // namespace hetnas::diff
