// SPDX-License-Identifier: Apache-2.0
#include "hetnas/diff/optim.hpp"

#include "hetnas/errors.hpp"

#include <cmath>

namespace hetnas::diff {

Adam::Adam(std::vector<Tensor> params, AdamOptions options, std::vector<bool> decay)
    : params_(std::move(params)), options_(options), decay_(std::move(decay)) {
  if (!(options_.lr > 0.0)) throw ParameterError("learning rate must be positive");
  if (options_.weight_decay < 0.0) throw ParameterError("weight decay must be non-negative");
  if (decay_.empty()) decay_.assign(params_.size(), true);
  if (decay_.size() != params_.size()) throw ParameterError("decay mask size mismatch");
  for (const auto& p : params_) {
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void Adam::step() {
  ++step_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    if (!p.has_grad()) continue;
    Matrix g = p.grad();
    if (decay_[i] && options_.weight_decay > 0.0) g += options_.weight_decay * p.value();
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
    v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * g.cwiseProduct(g);
    p.mutable_value().array() -=
        options_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + options_.eps);
    p.zero_grad();
  }
}

void Adam::zero_grad() { zero_grads(params_); }

void zero_grads(const std::vector<Tensor>& params) {
  for (auto p : params) p.zero_grad();
}

}  // namespace hetnas::diff
