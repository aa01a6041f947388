// SPDX-License-Identifier: Apache-2.0
#include "hetnas/diff/tensor.hpp"

#include "hetnas/errors.hpp"

#include <cmath>
#include <string>

namespace hetnas::diff {

std::string shape_string(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

void require_finite(const Matrix& m, const char* where) {
  // A non-finite entry always makes the sum non-finite; the exact scan only
  // runs when the sum overflows or an entry is bad.
  if (std::isfinite(m.sum())) return;
  if (!m.allFinite()) {
    throw NumericalError(std::string("non-finite value produced by ") + where);
  }
}

Tensor Tensor::constant(Matrix value) {
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->value = std::move(value);
  return t;
}

Tensor Tensor::parameter(Matrix value) {
  Tensor t = constant(std::move(value));
  t.impl_->requires_grad = true;
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return requires_grad ? parameter(std::move(m)) : constant(std::move(m));
}

Tensor Tensor::make_result(Matrix value, bool requires_grad) {
  Tensor t = constant(std::move(value));
  t.impl_->requires_grad = requires_grad;
  t.impl_->leaf = false;
  return t;
}

double Tensor::item() const {
  if (!is_scalar()) {
    throw DimensionError("item() on non-scalar tensor " + shape_string(value()));
  }
  return impl_->value(0, 0);
}

Matrix& Tensor::grad_buffer() {
  if (impl_->grad.size() == 0) {
    impl_->grad = Matrix::Zero(impl_->value.rows(), impl_->value.cols());
  }
  return impl_->grad;
}

}  // namespace hetnas::diff
