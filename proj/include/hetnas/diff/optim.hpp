// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/diff/tensor.hpp"

#include <vector>

namespace hetnas::diff {

struct AdamOptions {
  double lr = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// L2 penalty added to the gradient of parameters flagged for decay.
  double weight_decay = 0.0;
};

/// Adam over a fixed parameter list. Parameters without a gradient are left
/// untouched for that step.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options, std::vector<bool> decay = {});

  /// Applies one update and clears every parameter's gradient.
  void step();
  void zero_grad();
  const AdamOptions& options() const { return options_; }

 private:
  std::vector<Tensor> params_;
  AdamOptions options_;
  std::vector<bool> decay_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long step_ = 0;
};

void zero_grads(const std::vector<Tensor>& params);

}  // namespace hetnas::diff
