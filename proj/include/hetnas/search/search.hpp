// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/diff/tape.hpp"
#include "hetnas/diff/tensor.hpp"
#include "hetnas/errors.hpp"
#include "hetnas/graph/graph.hpp"
#include "hetnas/supernet/supernet.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <vector>

namespace hetnas::search {

using diff::Matrix;
using diff::Tape;
using diff::Tensor;
using supernet::BlockKind;
using supernet::SlotId;

/// Two-layer perceptron from a block's concatenated inputs to candidate
/// logits: relu(x W1 + b1) W2 + b2.
struct Predictor {
  SlotId slot;
  diff::Index input_width = 0;
  supernet::Linear hidden;  // input_width x 2d
  supernet::Linear out;     // 2d x k
};

/// One predictor per searchable slot. Sizes depend on the hidden width and
/// the candidate lists only, never on the graph.
class PredictorSet {
 public:
  PredictorSet(const supernet::SupernetConfig& config, std::uint64_t seed);

  /// d for selection and attention, 2d for every other block.
  static diff::Index input_width(BlockKind kind, int hidden);

  const std::vector<Predictor>& predictors() const { return predictors_; }
  const Predictor& at(const SlotId& slot) const;
  std::vector<Tensor> parameters() const;
  std::size_t parameter_count() const;

 private:
  std::vector<Predictor> predictors_;
};

/// softmax_temperature(f(inputs[0] || inputs[1] || ...), tau), n x k.
/// Throws DimensionError when the concatenated width differs from the
/// predictor's input width.
Tensor predict_block_weights(Tape& tape, const Predictor& predictor,
                             std::span<const Tensor> inputs, double tau);

/// Per-node convex combination sum_i c[:, i] * candidate_outputs[i].
Tensor mixed_block(Tape& tape, std::span<const Tensor> candidate_outputs, const Tensor& c);

/// Mixture probabilities per slot, n x k each.
struct MixWeights {
  std::map<SlotId, Matrix> probs;

  /// Throws NumericalError unless every row is a probability vector
  /// (entries >= 0, sum within 1e-10 of 1).
  void validate() const;
  /// Mean over slots and nodes of -sum_i c_i log c_i.
  double mean_entropy() const;
};

/// Argmax per node and slot, lowest candidate position on ties, mapped to
/// catalog codes.
supernet::NodeArchitecture discretize(const MixWeights& weights,
                                      const supernet::SupernetConfig& config,
                                      std::size_t num_nodes);

/// Architecture source that evaluates the predictors during the forward
/// pass and keeps the realised probabilities.
class PredictorSource : public supernet::ArchitectureSource {
 public:
  PredictorSource(const PredictorSet& predictors, double tau, bool straight_through = false);

  supernet::BlockWeights weights(Tape& tape, const SlotId& slot,
                                 std::span<const Tensor> inputs) override;
  const MixWeights& mix_weights() const { return mix_; }

 private:
  const PredictorSet& predictors_;
  double tau_;
  bool straight_through_;
  MixWeights mix_;
};

struct SearchConfig {
  int epochs = 200;
  double model_lr = 0.005;
  double predictor_lr = 0.005;
  double weight_decay = 5e-4;
  double tau_start = 1.0;
  double tau_end = 0.1;
  /// Update model and predictors together on the training loss instead of
  /// alternating train / validation steps.
  bool joint = false;
  /// Hard one-hot forward with soft gradients.
  bool straight_through = false;
  std::uint64_t seed = 0;

  void validate() const;
  /// tau_start * (tau_end / tau_start)^(epoch / (epochs - 1)).
  double tau_at(int epoch) const;

  nlohmann::json to_json() const;
  static SearchConfig from_json(const nlohmann::json& j);
  bool operator==(const SearchConfig&) const = default;
};

struct TraceRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double tau = 0.0;
  double mean_entropy = 0.0;
};

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

/// Raised when a loss turns non-finite; carries the rows completed so far.
class SearchDiverged : public NumericalError {
 public:
  SearchDiverged(const std::string& what, std::vector<TraceRow> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

struct SearchResult {
  supernet::NodeArchitecture architecture;
  MixWeights weights;
  std::vector<TraceRow> trace;
};

/// Alternating first-order search: the model steps on the training loss,
/// the predictors on the validation loss (or both on the training loss when
/// `joint`). Returns the discretized final mixture.
SearchResult search(const graph::Graph& g, const graph::Split& split,
                    const supernet::SupernetConfig& snconfig, const SearchConfig& config);

}  // namespace hetnas::search
