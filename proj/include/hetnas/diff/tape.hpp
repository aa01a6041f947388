// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/diff/tensor.hpp"

#include <functional>
#include <vector>

namespace hetnas::diff {

/// Ordered record of executed ops for one reverse pass.
///
/// Ops record an entry only when their output requires a gradient, so a
/// forward pass over constants leaves the tape empty. After backward()
/// the tape is consumed; recording or running backward again without
/// reset() throws TapeError.
class Tape {
 public:
  /// Receives the gradient w.r.t. the op output and accumulates into the
  /// op inputs' grad buffers.
  using BackwardFn = std::function<void(const Matrix& grad_out)>;

  void record(const char* op, const Tensor& output, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1 and replays entries in reverse order.
  /// Intermediate gradients are released once consumed; leaf gradients
  /// accumulate across calls until zero_grad().
  void backward(const Tensor& loss);

  void reset();

  std::size_t size() const { return entries_.size(); }
  bool consumed() const { return consumed_; }

 private:
  struct Entry {
    const char* op;
    Tensor output;
    BackwardFn backward;
  };
  std::vector<Entry> entries_;
  bool consumed_ = false;
};

}  // namespace hetnas::diff
