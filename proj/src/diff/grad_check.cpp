// SPDX-License-Identifier: Apache-2.0
#include "hetnas/diff/grad_check.hpp"

#include "hetnas/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hetnas::diff {

namespace {

double evaluate(const ScalarProgram& program) {
  Tape tape;
  return program(tape).item();
}

}  // namespace

GradCheckResult grad_check(const ScalarProgram& program, std::vector<Tensor> params, double eps) {
  if (!(eps > 0.0)) {
    throw ParameterError("grad_check: eps must be positive");
  }
  for (auto& p : params) p.zero_grad();

  const double first = evaluate(program);
  Tape tape;
  Tensor loss = program(tape);
  if (loss.item() != first) {
    throw NumericalError("grad_check: program is not deterministic (two evaluations differ)");
  }
  tape.backward(loss);

  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) {
    analytic.push_back(p.has_grad() ? p.grad() : Matrix::Zero(p.rows(), p.cols()));
  }

  GradCheckResult out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& value = params[i].mutable_value();
    for (Index r = 0; r < value.rows(); ++r) {
      for (Index c = 0; c < value.cols(); ++c) {
        const double saved = value(r, c);
        value(r, c) = saved + eps;
        const double plus = evaluate(program);
        value(r, c) = saved - eps;
        const double minus = evaluate(program);
        value(r, c) = saved;

        const double numeric = (plus - minus) / (2.0 * eps);
        const double a = analytic[i](r, c);
        const double err =
            std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
        if (err > out.max_relative_error || (i == 0 && r == 0 && c == 0)) {
          out = GradCheckResult{err, i, r, c, a, numeric};
        }
      }
    }
  }
  for (auto& p : params) p.zero_grad();
  return out;
}

}  // namespace hetnas::diff
