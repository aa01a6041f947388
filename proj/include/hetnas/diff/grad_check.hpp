// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/diff/tape.hpp"
#include "hetnas/diff/tensor.hpp"

#include <functional>
#include <vector>

namespace hetnas::diff {

/// A deterministic program mapping the current parameter values to a
/// scalar loss recorded on the given tape.
using ScalarProgram = std::function<Tensor(Tape&)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_param = 0;
  Index worst_row = 0;
  Index worst_col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Compares reverse-mode gradients with central differences.
///
/// Error per coordinate is |analytic - numeric| / max(1, |analytic|, |numeric|).
/// Throws NumericalError if two evaluations at the same point disagree
/// (non-deterministic program) and ParameterError if eps <= 0.
GradCheckResult grad_check(const ScalarProgram& program, std::vector<Tensor> params,
                           double eps = 1e-3);

}  // namespace hetnas::diff
