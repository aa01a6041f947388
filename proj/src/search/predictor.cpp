// SPDX-License-Identifier: Apache-2.0
#include "hetnas/diff/ops.hpp"
#include "hetnas/search/search.hpp"

#include <cmath>
#include <random>
#include <string>

namespace hetnas::search {

namespace {

Tensor glorot(diff::Index rows, diff::Index cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (diff::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return Tensor::parameter(std::move(m));
}

}  // namespace

diff::Index PredictorSet::input_width(BlockKind kind, int hidden) {
  const bool single = kind == BlockKind::Selection || kind == BlockKind::Attention;
  return single ? hidden : 2 * static_cast<diff::Index>(hidden);
}

PredictorSet::PredictorSet(const supernet::SupernetConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  const diff::Index width = 2 * static_cast<diff::Index>(config.hidden);
  for (const SlotId& slot : supernet::all_slots(config.layers)) {
    Predictor p;
    p.slot = slot;
    p.input_width = input_width(slot.kind, config.hidden);
    const auto k = static_cast<diff::Index>(config.candidates_of(slot.kind).size());
    p.hidden = {glorot(p.input_width, width, rng), Tensor::parameter(Matrix::Zero(1, width))};
    p.out = {glorot(width, k, rng), Tensor::parameter(Matrix::Zero(1, k))};
    predictors_.push_back(std::move(p));
  }
}

const Predictor& PredictorSet::at(const SlotId& slot) const {
  for (const auto& p : predictors_) {
    if (p.slot == slot) return p;
  }
  throw ParameterError("no predictor for slot " + slot.label());
}

std::vector<Tensor> PredictorSet::parameters() const {
  std::vector<Tensor> out;
  for (const auto& p : predictors_) {
    out.push_back(p.hidden.weight);
    out.push_back(p.hidden.bias);
    out.push_back(p.out.weight);
    out.push_back(p.out.bias);
  }
  return out;
}

std::size_t PredictorSet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : parameters()) n += static_cast<std::size_t>(t.value().size());
  return n;
}

Tensor predict_block_weights(Tape& tape, const Predictor& predictor,
                             std::span<const Tensor> inputs, double tau) {
  if (inputs.empty()) throw DimensionError("predictor for " + predictor.slot.label() + " got no inputs");
  const Tensor x = inputs.size() == 1 ? inputs[0] : diff::concat_cols(tape, inputs);
  if (x.cols() != predictor.input_width) {
    throw DimensionError("predictor for " + predictor.slot.label() + " expects width " +
                         std::to_string(predictor.input_width) + ", got " + std::to_string(x.cols()));
  }
  const Tensor h = diff::relu(tape, supernet::linear(tape, x, predictor.hidden));
  return diff::softmax_temperature(tape, supernet::linear(tape, h, predictor.out), tau);
}

Tensor mixed_block(Tape& tape, std::span<const Tensor> candidate_outputs, const Tensor& c) {
  if (static_cast<diff::Index>(candidate_outputs.size()) != c.cols()) {
    throw DimensionError("mixture has " + std::to_string(c.cols()) + " weights for " +
                         std::to_string(candidate_outputs.size()) + " candidates");
  }
  return supernet::mix_candidates(tape, supernet::BlockWeights::soft(c),
                                  [&](std::size_t i) { return candidate_outputs[i]; });
}

void MixWeights::validate() const {
  for (const auto& [slot, m] : probs) {
    for (diff::Index r = 0; r < m.rows(); ++r) {
      if ((m.row(r).array() < 0.0).any() || std::abs(m.row(r).sum() - 1.0) > 1e-10) {
        throw NumericalError("mix weights of " + slot.label() + " row " + std::to_string(r) +
                             " are not a probability vector");
      }
    }
  }
}

double MixWeights::mean_entropy() const {
  if (probs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [slot, m] : probs) {
    double slot_sum = 0.0;
    for (diff::Index i = 0; i < m.size(); ++i) {
      const double c = m.data()[i];
      if (c > 0.0) slot_sum -= c * std::log(c);
    }
    total += m.rows() > 0 ? slot_sum / static_cast<double>(m.rows()) : 0.0;
  }
  return total / static_cast<double>(probs.size());
}

supernet::NodeArchitecture discretize(const MixWeights& weights,
                                      const supernet::SupernetConfig& config,
                                      std::size_t num_nodes) {
  supernet::NodeArchitecture arch(num_nodes, config.layers);
  for (const SlotId& slot : supernet::all_slots(config.layers)) {
    const auto it = weights.probs.find(slot);
    if (it == weights.probs.end()) throw ParameterError("no mix weights for slot " + slot.label());
    const Matrix& m = it->second;
    const auto& cands = config.candidates_of(slot.kind);
    if (m.rows() != static_cast<diff::Index>(num_nodes) ||
        m.cols() != static_cast<diff::Index>(cands.size())) {
      throw DimensionError("mix weights of " + slot.label() + " have shape " + diff::shape_string(m));
    }
    auto& ops = arch.slot_ops(slot);
    for (diff::Index u = 0; u < m.rows(); ++u) {
      diff::Index best = 0;
      for (diff::Index i = 1; i < m.cols(); ++i) {
        if (m(u, i) > m(u, best)) best = i;
      }
      ops[static_cast<std::size_t>(u)] = cands[static_cast<std::size_t>(best)];
    }
  }
  return arch;
}

PredictorSource::PredictorSource(const PredictorSet& predictors, double tau, bool straight_through)
    : predictors_(predictors), tau_(tau), straight_through_(straight_through) {
  if (!(tau > 0.0)) throw ParameterError("temperature must be positive");
}

supernet::BlockWeights PredictorSource::weights(Tape& tape, const SlotId& slot,
                                                std::span<const Tensor> inputs) {
  const Tensor probs = predict_block_weights(tape, predictors_.at(slot), inputs, tau_);
  mix_.probs[slot] = probs.value();
  if (straight_through_) return supernet::BlockWeights::soft(diff::straight_through_argmax(tape, probs));
  return supernet::BlockWeights::soft(probs);
}

}  // namespace hetnas::search
