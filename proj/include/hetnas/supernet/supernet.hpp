// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/diff/ops.hpp"
#include "hetnas/diff/sparse.hpp"
#include "hetnas/diff/tape.hpp"
#include "hetnas/diff/tensor.hpp"
#include "hetnas/graph/graph.hpp"
#include "hetnas/supernet/architecture.hpp"
#include "hetnas/supernet/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hetnas::supernet {

using diff::Matrix;
using diff::SparseMatrix;
using diff::Tape;
using diff::Tensor;

enum class Mode { Train, Eval };

struct Linear {
  Tensor weight;  // in x out
  Tensor bias;    // 1 x out
};

struct LayerParams {
  Linear update;         // d x d, applied after the update combine
  Tensor gate;           // d x 2, GATE_FILTER edge gate: columns act on h_u and h_v
  Tensor signed_coef;    // 1 x 2, SIGNED positive / negative branch logits
  Tensor update_att;     // 2d x 1, ATT combine of (h_prev, m)
  Tensor residual_att;   // 2d x 1, ATT combine of (h_prev, h_agg)
};

/// All learnable model weights. Merge blocks carry no linear transform.
struct SupernetParams {
  Linear input;                    // F x d
  std::vector<LayerParams> layers;
  Tensor inter_weights;            // n x (L+1) or 1 x (L+1), LEARN_ATT layer weights
  Linear mlp_hidden;               // F x d
  Linear mlp_out;                  // d x d
  Tensor output_att;               // 2d x 1, ATT combine of (h_MLP, h_GNN)
  Linear classifier;               // d x C

  /// Every parameter in a fixed order, with stable names.
  std::vector<std::pair<std::string, Tensor>> named() const;
  std::vector<Tensor> all() const;
};

/// Model weights plus the dimensions they were built for.
class Supernet {
 public:
  /// `num_nodes` sizes the node-wise LEARN_ATT weights; it is ignored when
  /// the config shares one row across nodes.
  Supernet(SupernetConfig config, std::size_t in_features, int num_classes, std::size_t num_nodes,
           std::uint64_t seed);

  const SupernetConfig& config() const { return config_; }
  std::size_t in_features() const { return in_features_; }
  std::size_t num_nodes() const { return num_nodes_; }
  int num_classes() const { return num_classes_; }

  SupernetParams& params() { return params_; }
  const SupernetParams& params() const { return params_; }
  std::vector<Tensor> parameters() const { return params_.all(); }
  std::size_t parameter_count() const;
  /// True for linear-map weight matrices, false for biases, gates and
  /// layer weights; parallel to parameters().
  std::vector<bool> decay_mask() const;

  /// Deep copy of every parameter value, in parameters() order.
  std::vector<Matrix> snapshot() const;
  void restore(const std::vector<Matrix>& values);

  nlohmann::json to_json() const;
  static Supernet from_json(const nlohmann::json& j);

 private:
  SupernetConfig config_;
  std::size_t in_features_ = 0;
  int num_classes_ = 0;
  std::size_t num_nodes_ = 0;
  SupernetParams params_;
};

/// Graph-derived constants shared by every forward pass over one graph.
///
/// All edge-level tensors live on the closed-neighbourhood pattern A + I;
/// the 1N support is the same pattern with the diagonal masked to zero.
class PropagationContext {
 public:
  explicit PropagationContext(const graph::Graph& g);
  PropagationContext(const PropagationContext&) = delete;
  PropagationContext& operator=(const PropagationContext&) = delete;

  const graph::Graph& graph() const { return *graph_; }
  std::size_t num_nodes() const { return graph_->num_nodes(); }
  const SparseMatrix& pattern() const { return pattern_; }
  const Tensor& features() const { return features_; }

  /// 0/1 per pattern entry: whether the entry belongs to the op's support.
  const Tensor& selection_mask(SelectionOp op) const;
  /// 1/sqrt(d_u d_v) with degrees counted over the op's support.
  const Tensor& sym_norm(SelectionOp op) const;
  const Tensor& ones() const { return ones_; }

 private:
  const graph::Graph* graph_;
  SparseMatrix pattern_;
  Tensor features_;
  Tensor ones_;
  Tensor mask_one_hop_;
  Tensor mask_loop_;
  Tensor norm_one_hop_;
  Tensor norm_loop_;
};

/// Per-node weighting over a block's candidate list: either a soft n x k
/// probability matrix or a hard choice of one candidate per node.
class BlockWeights {
 public:
  static BlockWeights soft(Tensor probs);
  static BlockWeights hard(std::vector<int> positions, std::size_t num_candidates);

  std::size_t num_candidates() const { return num_candidates_; }
  bool is_soft() const { return soft_.defined(); }
  const Tensor& probs() const { return soft_; }
  const std::vector<int>& positions() const { return positions_; }
  bool used(std::size_t candidate) const;
  /// Set when the weights are hard and every node picks the same candidate.
  std::optional<std::size_t> uniform() const;
  /// n x 1 weight column of a candidate.
  Tensor column(Tape& tape, std::size_t candidate) const;

 private:
  Tensor soft_;
  std::vector<int> positions_;
  std::size_t num_candidates_ = 0;
};

/// Supplies block weights while the forward pass runs. `inputs` are the
/// tensors the block consumes (see forward()).
class ArchitectureSource {
 public:
  virtual ~ArchitectureSource() = default;
  virtual BlockWeights weights(Tape& tape, const SlotId& slot, std::span<const Tensor> inputs) = 0;
  /// Candidate position every node uses at `slot`, when known before the
  /// block's inputs are computed.
  virtual std::optional<std::size_t> known_uniform(const SlotId&) const { return std::nullopt; }
};

/// Hard weights read from a NodeArchitecture.
class FixedArchitecture : public ArchitectureSource {
 public:
  FixedArchitecture(const NodeArchitecture& arch, const SupernetConfig& config);
  BlockWeights weights(Tape& tape, const SlotId& slot, std::span<const Tensor> inputs) override;
  std::optional<std::size_t> known_uniform(const SlotId& slot) const override;

 private:
  std::vector<int> positions(const SlotId& slot) const;

  const NodeArchitecture& arch_;
  const SupernetConfig& config_;
};

/// h_{l-1}, m_l, h_{l,agg}, h_l of one layer.
struct LayerState {
  Tensor h_prev;
  Tensor message;
  Tensor h_agg;
  Tensor h_out;
};

struct ForwardResult {
  Tensor logits;
  Tensor h0;
  std::vector<LayerState> layers;
  Tensor h_mlp;
  Tensor h_gnn;
  Tensor merged;  // output-merge result fed to the classifier
  /// Realised edge weights e = e^s * e^att per layer (pattern order).
  std::vector<Tensor> edge_weights;
  /// ATT gates per layer / at the output merge; undefined when unused.
  std::vector<Tensor> update_gates;
  std::vector<Tensor> residual_gates;
  Tensor output_gate;
};

// --- blocks ---------------------------------------------------------------

/// Support of the selected neighbourhoods, one selection op per node;
/// every stored value is 1.
SparseMatrix select_neighbors(const graph::Graph& g, std::span<const SelectionOp> per_node);

/// Attention values on the full pattern for one (selection, attention)
/// pair, before masking by the selection support.
Tensor attention_weights(Tape& tape, const PropagationContext& ctx, AttentionOp op,
                         SelectionOp selection, const Tensor& h, const LayerParams& layer);

/// m = E h with E given by edge values on the context pattern.
Tensor aggregate_add(Tape& tape, const PropagationContext& ctx, const Tensor& edge_weights,
                     const Tensor& h);

/// Two-input combine. ATT uses gamma = sigmoid([x1 || x2] a) per node and
/// returns gamma x1 + (1 - gamma) x2; `gate_out` receives gamma.
Tensor combine(Tape& tape, Combine kind, const Tensor& x1, const Tensor& x2,
               const Tensor& att_vector, Tensor* gate_out = nullptr);

/// relu(combine(h_prev, m) W + b), with dropout on the combined input.
Tensor update_block(Tape& tape, UpdateOp op, const Tensor& h_prev, const Tensor& message,
                    const LayerParams& layer, double dropout, Mode mode, std::mt19937_64& rng,
                    Tensor* gate_out = nullptr);

Tensor residual_merge(Tape& tape, ResidualOp op, const Tensor& h_prev, const Tensor& h_agg,
                      const Tensor& att_vector, Tensor* gate_out = nullptr);

/// `states` holds h_0 ... h_L; `layer_weights` is n x (L+1) or 1 x (L+1).
Tensor inter_merge(Tape& tape, InterMergeOp op, std::span<const Tensor> states,
                   const Tensor& layer_weights);

Tensor mlp_branch(Tape& tape, const PropagationContext& ctx, const Linear& hidden,
                  const Linear& out, double dropout, Mode mode, std::mt19937_64& rng);

Tensor output_merge(Tape& tape, OutputMergeOp op, const Tensor& h_mlp, const Tensor& h_gnn,
                    const Tensor& att_vector, Tensor* gate_out = nullptr);

/// x W + b, reading x from the sparse feature copy when one exists.
Tensor linear(Tape& tape, const Tensor& x, const Linear& layer);
Tensor linear_on_features(Tape& tape, const PropagationContext& ctx, const Linear& layer);

/// Sum over used candidates of column(i) * candidate(i); a uniform hard
/// choice returns that candidate unchanged.
Tensor mix_candidates(Tape& tape, const BlockWeights& weights,
                      const std::function<Tensor(std::size_t)>& candidate);

// --- whole network --------------------------------------------------------

/// Runs the seven-block network. Weights are requested from `source` in
/// forward order with these inputs:
///   selection, attention  {h_{l-1}}
///   update                {h_{l-1}, m_l}
///   residual merge        {h_{l-1}, h_{l,agg}}
///   inter merge           {h_0, h_L}
///   output merge          {h_MLP, h_GNN}
ForwardResult forward(Tape& tape, const Supernet& net, const PropagationContext& ctx,
                      ArchitectureSource& source, Mode mode, std::mt19937_64& rng);

/// Forward pass with the per-node choices of `arch`.
ForwardResult forward_fixed(Tape& tape, const Supernet& net, const PropagationContext& ctx,
                            const NodeArchitecture& arch, Mode mode, std::mt19937_64& rng);

}  // namespace hetnas::supernet
