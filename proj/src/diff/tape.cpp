// SPDX-License-Identifier: Apache-2.0
#include "hetnas/diff/tape.hpp"

#include "hetnas/errors.hpp"

#include <string>

namespace hetnas::diff {

void Tape::record(const char* op, const Tensor& output, BackwardFn backward) {
  if (consumed_) {
    throw TapeError(std::string("cannot record '") + op + "' on a consumed tape; call reset()");
  }
  entries_.push_back(Entry{op, output, std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  if (consumed_) {
    throw TapeError("tape already consumed by a previous backward pass");
  }
  if (!loss.defined() || !loss.is_scalar()) {
    throw DimensionError("backward requires a scalar loss, got " +
                         (loss.defined() ? shape_string(loss.value()) : std::string("undefined")));
  }
  if (!loss.requires_grad()) {
    throw TapeError("loss does not depend on any parameter");
  }

  std::size_t last = entries_.size();
  if (!loss.is_leaf()) {
    bool found = false;
    while (last > 0) {
      if (entries_[last - 1].output.id() == loss.id()) {
        found = true;
        break;
      }
      --last;
    }
    if (!found) {
      throw TapeError("loss was not produced on this tape");
    }
  }

  consumed_ = true;
  Tensor seed = loss;
  seed.grad_buffer()(0, 0) += 1.0;

  for (std::size_t i = last; i-- > 0;) {
    Entry& entry = entries_[i];
    if (!entry.output.has_grad()) {
      continue;
    }
    entry.backward(entry.output.grad());
    entry.output.zero_grad();
    entry.backward = nullptr;
  }
}

void Tape::reset() {
  entries_.clear();
  consumed_ = false;
}

}  // namespace hetnas::diff
