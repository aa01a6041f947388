// SPDX-License-Identifier: Apache-2.0
#include "hetnas/supernet/supernet.hpp"

#include "hetnas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

namespace hetnas::supernet {

namespace ops = diff;

// --- context ----------------------------------------------------------------

PropagationContext::PropagationContext(const graph::Graph& g) : graph_(&g) {
  const auto n = static_cast<diff::Index>(g.num_nodes());
  const SparseMatrix& adj = g.adjacency();
  std::vector<std::tuple<std::int32_t, std::int32_t, double>> triplets;
  triplets.reserve(adj.nnz() + g.num_nodes());
  const auto rows = adj.entry_rows();
  for (std::size_t k = 0; k < adj.nnz(); ++k) triplets.emplace_back(rows[k], adj.indices()[k], 1.0);
  for (std::int32_t u = 0; u < static_cast<std::int32_t>(n); ++u) triplets.emplace_back(u, u, 1.0);
  pattern_ = SparseMatrix::from_triplets(n, n, std::move(triplets));

  features_ = Tensor::constant(g.features());
  const auto nnz = static_cast<diff::Index>(pattern_.nnz());
  ones_ = Tensor::constant(Matrix::Ones(nnz, 1));

  const auto prow = pattern_.entry_rows();
  const auto& deg = g.degrees();
  Matrix mask1(nnz, 1), norm1(nnz, 1), norm_loop(nnz, 1);
  for (diff::Index k = 0; k < nnz; ++k) {
    const int u = prow[k];
    const int v = pattern_.indices()[k];
    const bool diag = u == v;
    mask1(k, 0) = diag ? 0.0 : 1.0;
    const double du = deg[u], dv = deg[v];
    norm1(k, 0) = (diag || du * dv == 0.0) ? 0.0 : 1.0 / std::sqrt(du * dv);
    norm_loop(k, 0) = 1.0 / std::sqrt((du + 1.0) * (dv + 1.0));
  }
  mask_one_hop_ = Tensor::constant(std::move(mask1));
  mask_loop_ = ones_;
  norm_one_hop_ = Tensor::constant(std::move(norm1));
  norm_loop_ = Tensor::constant(std::move(norm_loop));
}

const Tensor& PropagationContext::selection_mask(SelectionOp op) const {
  return op == SelectionOp::OneHop ? mask_one_hop_ : mask_loop_;
}

const Tensor& PropagationContext::sym_norm(SelectionOp op) const {
  return op == SelectionOp::OneHop ? norm_one_hop_ : norm_loop_;
}

// --- block weights ------------------------------------------------------------

BlockWeights BlockWeights::soft(Tensor probs) {
  if (!probs.defined() || probs.cols() < 1) throw DimensionError("soft block weights need k >= 1 columns");
  BlockWeights w;
  w.num_candidates_ = static_cast<std::size_t>(probs.cols());
  w.soft_ = std::move(probs);
  return w;
}

BlockWeights BlockWeights::hard(std::vector<int> positions, std::size_t num_candidates) {
  for (int p : positions) {
    if (p < 0 || static_cast<std::size_t>(p) >= num_candidates) {
      throw ParameterError("candidate position " + std::to_string(p) + " outside [0, " +
                           std::to_string(num_candidates) + ")");
    }
  }
  BlockWeights w;
  w.positions_ = std::move(positions);
  w.num_candidates_ = num_candidates;
  return w;
}

bool BlockWeights::used(std::size_t candidate) const {
  if (is_soft()) return candidate < num_candidates_;
  return std::find(positions_.begin(), positions_.end(), static_cast<int>(candidate)) != positions_.end();
}

std::optional<std::size_t> BlockWeights::uniform() const {
  if (is_soft() || positions_.empty()) return std::nullopt;
  const int first = positions_.front();
  for (int p : positions_) {
    if (p != first) return std::nullopt;
  }
  return static_cast<std::size_t>(first);
}

Tensor BlockWeights::column(Tape& tape, std::size_t candidate) const {
  if (candidate >= num_candidates_) throw ParameterError("candidate index out of range");
  if (is_soft()) return ops::slice_cols(tape, soft_, static_cast<diff::Index>(candidate), 1);
  Matrix col(static_cast<diff::Index>(positions_.size()), 1);
  for (std::size_t u = 0; u < positions_.size(); ++u) {
    col(static_cast<diff::Index>(u), 0) = positions_[u] == static_cast<int>(candidate) ? 1.0 : 0.0;
  }
  return Tensor::constant(std::move(col));
}

FixedArchitecture::FixedArchitecture(const NodeArchitecture& arch, const SupernetConfig& config)
    : arch_(arch), config_(config) {}

std::vector<int> FixedArchitecture::positions(const SlotId& slot) const {
  const auto& cands = config_.candidates_of(slot.kind);
  const auto& codes = arch_.slot_ops(slot);
  std::vector<int> out(codes.size());
  for (std::size_t u = 0; u < codes.size(); ++u) {
    const auto it = std::find(cands.begin(), cands.end(), codes[u]);
    if (it == cands.end()) {
      throw ParameterError("slot " + slot.label() + " node " + std::to_string(u) + " uses " +
                           std::string(op_name(slot.kind, codes[u])) + ", not a candidate");
    }
    out[u] = static_cast<int>(it - cands.begin());
  }
  return out;
}

BlockWeights FixedArchitecture::weights(Tape&, const SlotId& slot, std::span<const Tensor>) {
  return BlockWeights::hard(positions(slot), config_.candidates_of(slot.kind).size());
}

std::optional<std::size_t> FixedArchitecture::known_uniform(const SlotId& slot) const {
  return BlockWeights::hard(positions(slot), config_.candidates_of(slot.kind).size()).uniform();
}

// --- blocks -------------------------------------------------------------------

SparseMatrix select_neighbors(const graph::Graph& g, std::span<const SelectionOp> per_node) {
  const auto n = g.num_nodes();
  if (per_node.size() != n) throw DimensionError("selection needs one op per node");
  const SparseMatrix& adj = g.adjacency();
  std::vector<std::tuple<std::int32_t, std::int32_t, double>> triplets;
  for (std::size_t u = 0; u < n; ++u) {
    const auto iu = static_cast<std::int32_t>(u);
    for (auto k = adj.offsets()[u]; k < adj.offsets()[u + 1]; ++k) {
      triplets.emplace_back(iu, adj.indices()[static_cast<std::size_t>(k)], 1.0);
    }
    if (per_node[u] == SelectionOp::OneHopLoop) triplets.emplace_back(iu, iu, 1.0);
  }
  const auto dim = static_cast<diff::Index>(n);
  return SparseMatrix::from_triplets(dim, dim, std::move(triplets));
}

Tensor attention_weights(Tape& tape, const PropagationContext& ctx, AttentionOp op,
                         SelectionOp selection, const Tensor& h, const LayerParams& layer) {
  switch (op) {
    case AttentionOp::Const:
      return ctx.ones();
    case AttentionOp::SymNorm:
      return ctx.sym_norm(selection);
    case AttentionOp::GateFilter: {
      const Tensor pq = ops::matmul(tape, h, layer.gate);
      return ops::tanh(tape, ops::edge_sum(tape, ctx.pattern(), ops::slice_cols(tape, pq, 0, 1),
                                           ops::slice_cols(tape, pq, 1, 1)));
    }
    case AttentionOp::Signed: {
      const Tensor unit = ops::row_normalize(tape, h);
      const Tensor cos = ops::edge_dot(tape, ctx.pattern(), unit, unit);
      const Tensor coef = ops::sigmoid(tape, layer.signed_coef);
      const Tensor pos = ops::scale_by(tape, ops::relu(tape, cos), ops::slice_cols(tape, coef, 0, 1));
      const Tensor neg =
          ops::scale_by(tape, ops::relu(tape, ops::scale(tape, cos, -1.0)), ops::slice_cols(tape, coef, 1, 1));
      return ops::sub(tape, pos, neg);
    }
  }
  throw ParameterError("unknown attention op");
}

Tensor aggregate_add(Tape& tape, const PropagationContext& ctx, const Tensor& edge_weights,
                     const Tensor& h) {
  return ops::spmm(tape, ctx.pattern(), edge_weights, h);
}

Tensor combine(Tape& tape, Combine kind, const Tensor& x1, const Tensor& x2,
               const Tensor& att_vector, Tensor* gate_out) {
  switch (kind) {
    case Combine::First:
      return x1;
    case Combine::Second:
      return x2;
    case Combine::Sum:
      return ops::add(tape, x1, x2);
    case Combine::Mean:
      return ops::scale(tape, ops::add(tape, x1, x2), 0.5);
    case Combine::Att: {
      const Tensor both[] = {x1, x2};
      const Tensor gamma = ops::sigmoid(tape, ops::matmul(tape, ops::concat_cols(tape, both), att_vector));
      if (gate_out) *gate_out = gamma;
      return ops::add(tape, ops::scale_rows(tape, x1, gamma),
                      ops::scale_rows(tape, x2, ops::affine(tape, gamma, -1.0, 1.0)));
    }
  }
  throw ParameterError("unknown combine");
}

Tensor linear(Tape& tape, const Tensor& x, const Linear& layer) {
  return ops::add_row_bias(tape, ops::matmul(tape, x, layer.weight), layer.bias);
}

Tensor linear_on_features(Tape& tape, const PropagationContext& ctx, const Linear& layer) {
  if (const SparseMatrix* sf = ctx.graph().sparse_features()) {
    return ops::add_row_bias(tape, ops::spmm(tape, *sf, layer.weight), layer.bias);
  }
  return linear(tape, ctx.features(), layer);
}

Tensor update_block(Tape& tape, UpdateOp op, const Tensor& h_prev, const Tensor& message,
                    const LayerParams& layer, double dropout, Mode mode, std::mt19937_64& rng,
                    Tensor* gate_out) {
  Tensor x = combine(tape, combine_of(op), h_prev, message, layer.update_att, gate_out);
  x = ops::dropout(tape, x, dropout, mode == Mode::Train, rng);
  return ops::relu(tape, linear(tape, x, layer.update));
}

Tensor residual_merge(Tape& tape, ResidualOp op, const Tensor& h_prev, const Tensor& h_agg,
                      const Tensor& att_vector, Tensor* gate_out) {
  return combine(tape, combine_of(op), h_prev, h_agg, att_vector, gate_out);
}

Tensor inter_merge(Tape& tape, InterMergeOp op, std::span<const Tensor> states,
                   const Tensor& layer_weights) {
  if (states.size() < 2) throw DimensionError("inter merge needs h_0 and at least one layer");
  switch (op) {
    case InterMergeOp::NonSkip:
      return states.back();
    case InterMergeOp::Sum:
    case InterMergeOp::Mean: {
      Tensor acc = states[0];
      for (std::size_t l = 1; l < states.size(); ++l) acc = ops::add(tape, acc, states[l]);
      if (op == InterMergeOp::Sum) return acc;
      return ops::scale(tape, acc, 1.0 / static_cast<double>(states.size()));
    }
    case InterMergeOp::LearnAtt: {
      const auto n = states[0].rows();
      const bool node_wise = layer_weights.rows() != 1 || n == 1;
      if (layer_weights.cols() != static_cast<diff::Index>(states.size()) ||
          (node_wise && layer_weights.rows() != n)) {
        throw DimensionError("layer weights " + diff::shape_string(layer_weights.value()) +
                             " do not match " + std::to_string(states.size()) + " states");
      }
      Tensor acc;
      for (std::size_t l = 0; l < states.size(); ++l) {
        const Tensor gamma = ops::slice_cols(tape, layer_weights, static_cast<diff::Index>(l), 1);
        const Tensor term = node_wise ? ops::scale_rows(tape, states[l], gamma)
                                      : ops::scale_by(tape, states[l], gamma);
        acc = acc.defined() ? ops::add(tape, acc, term) : term;
      }
      return acc;
    }
  }
  throw ParameterError("unknown inter-merge op");
}

Tensor mlp_branch(Tape& tape, const PropagationContext& ctx, const Linear& hidden,
                  const Linear& out, double dropout, Mode mode, std::mt19937_64& rng) {
  Tensor h = ops::relu(tape, linear_on_features(tape, ctx, hidden));
  h = ops::dropout(tape, h, dropout, mode == Mode::Train, rng);
  return ops::relu(tape, linear(tape, h, out));
}

Tensor output_merge(Tape& tape, OutputMergeOp op, const Tensor& h_mlp, const Tensor& h_gnn,
                    const Tensor& att_vector, Tensor* gate_out) {
  return combine(tape, combine_of(op), h_mlp, h_gnn, att_vector, gate_out);
}

Tensor mix_candidates(Tape& tape, const BlockWeights& weights,
                      const std::function<Tensor(std::size_t)>& candidate) {
  if (auto u = weights.uniform()) return candidate(*u);
  Tensor acc;
  for (std::size_t i = 0; i < weights.num_candidates(); ++i) {
    if (!weights.used(i)) continue;
    const Tensor term = ops::scale_rows(tape, candidate(i), weights.column(tape, i));
    acc = acc.defined() ? ops::add(tape, acc, term) : term;
  }
  if (!acc.defined()) throw ParameterError("block weights select no candidate");
  return acc;
}

// --- whole network ------------------------------------------------------------

namespace {

template <typename Op>
Op candidate_op(const SupernetConfig& config, BlockKind kind, std::size_t position) {
  return static_cast<Op>(config.candidates_of(kind).at(position));
}

/// Mixed edge weights of one layer; one product term per used
/// (selection, attention) pair.
Tensor layer_edge_weights(Tape& tape, const PropagationContext& ctx, const SupernetConfig& config,
                          const BlockWeights& w_se, const BlockWeights& w_att, const Tensor& h,
                          const LayerParams& layer) {
  std::map<std::pair<std::size_t, std::size_t>, Tensor> att_cache;
  auto pair_weights = [&](std::size_t s, std::size_t a) {
    const auto sel = candidate_op<SelectionOp>(config, BlockKind::Selection, s);
    const auto att = candidate_op<AttentionOp>(config, BlockKind::Attention, a);
    // Only SYM_NORM depends on the selection op.
    const std::size_t key_s = att == AttentionOp::SymNorm ? s : 0;
    auto it = att_cache.find({key_s, a});
    if (it == att_cache.end()) {
      it = att_cache.emplace(std::pair{key_s, a}, attention_weights(tape, ctx, att, sel, h, layer)).first;
    }
    return ops::mul(tape, ctx.selection_mask(sel), it->second);
  };

  const auto us = w_se.uniform();
  const auto ua = w_att.uniform();
  if (us && ua) return pair_weights(*us, *ua);

  Tensor acc;
  for (std::size_t s = 0; s < w_se.num_candidates(); ++s) {
    if (!w_se.used(s)) continue;
    const Tensor cs = w_se.column(tape, s);
    for (std::size_t a = 0; a < w_att.num_candidates(); ++a) {
      if (!w_att.used(a)) continue;
      const Tensor node_w = ops::mul(tape, cs, w_att.column(tape, a));
      const Tensor term =
          ops::mul(tape, ops::edge_from_rows(tape, ctx.pattern(), node_w), pair_weights(s, a));
      acc = acc.defined() ? ops::add(tape, acc, term) : term;
    }
  }
  return acc;
}

}  // namespace

ForwardResult forward(Tape& tape, const Supernet& net, const PropagationContext& ctx,
                      ArchitectureSource& source, Mode mode, std::mt19937_64& rng) {
  const SupernetConfig& config = net.config();
  const SupernetParams& p = net.params();
  if (ctx.graph().num_features() != net.in_features()) {
    throw DimensionError("graph has " + std::to_string(ctx.graph().num_features()) +
                         " features, model expects " + std::to_string(net.in_features()));
  }
  if (net.config().node_wise_layer_weights && ctx.num_nodes() != net.num_nodes()) {
    throw DimensionError("graph has " + std::to_string(ctx.num_nodes()) + " nodes, model was built for " +
                         std::to_string(net.num_nodes()));
  }
  if (ctx.graph().num_classes() > net.num_classes()) {
    throw DimensionError("graph has " + std::to_string(ctx.graph().num_classes()) +
                         " classes, model outputs " + std::to_string(net.num_classes()));
  }
  const bool train = mode == Mode::Train;
  const double drop = config.dropout;
  ForwardResult r;

  const SlotId om_slot{BlockKind::OutputMerge, -1};
  const auto om_known = source.known_uniform(om_slot);
  const bool mlp_only =
      om_known && candidate_op<OutputMergeOp>(config, BlockKind::OutputMerge, *om_known) ==
                      OutputMergeOp::Mlp;

  if (!mlp_only) {
    r.h0 = ops::relu(tape, linear_on_features(tape, ctx, p.input));
    std::vector<Tensor> states{r.h0};
    Tensor h = r.h0;
    for (int l = 0; l < config.layers; ++l) {
      const LayerParams& lp = p.layers[static_cast<std::size_t>(l)];
      LayerState st;
      st.h_prev = h;
      const Tensor sel_in[] = {h};
      const BlockWeights w_se = source.weights(tape, {BlockKind::Selection, l}, sel_in);
      const BlockWeights w_att = source.weights(tape, {BlockKind::Attention, l}, sel_in);
      const Tensor e = layer_edge_weights(tape, ctx, config, w_se, w_att, h, lp);
      r.edge_weights.push_back(e);
      st.message = aggregate_add(tape, ctx, e, h);

      const Tensor upd_in[] = {h, st.message};
      const BlockWeights w_upd = source.weights(tape, {BlockKind::Update, l}, upd_in);
      Tensor upd_gate;
      st.h_agg = mix_candidates(tape, w_upd, [&](std::size_t i) {
        return update_block(tape, candidate_op<UpdateOp>(config, BlockKind::Update, i), h,
                            st.message, lp, drop, mode, rng, &upd_gate);
      });
      r.update_gates.push_back(upd_gate);

      const Tensor res_in[] = {h, st.h_agg};
      const BlockWeights w_res = source.weights(tape, {BlockKind::Residual, l}, res_in);
      Tensor res_gate;
      st.h_out = mix_candidates(tape, w_res, [&](std::size_t i) {
        return residual_merge(tape, candidate_op<ResidualOp>(config, BlockKind::Residual, i), h,
                              st.h_agg, lp.residual_att, &res_gate);
      });
      r.residual_gates.push_back(res_gate);

      h = st.h_out;
      states.push_back(h);
      r.layers.push_back(std::move(st));
    }

    const Tensor im_in[] = {r.h0, h};
    const BlockWeights w_im = source.weights(tape, {BlockKind::InterMerge, -1}, im_in);
    r.h_gnn = mix_candidates(tape, w_im, [&](std::size_t i) {
      return inter_merge(tape, candidate_op<InterMergeOp>(config, BlockKind::InterMerge, i), states,
                         p.inter_weights);
    });
  }

  r.h_mlp = mlp_branch(tape, ctx, p.mlp_hidden, p.mlp_out, drop, mode, rng);
  if (mlp_only) {
    r.merged = r.h_mlp;
  } else {
    const Tensor om_in[] = {r.h_mlp, r.h_gnn};
    const BlockWeights w_om = source.weights(tape, om_slot, om_in);
    r.merged = mix_candidates(tape, w_om, [&](std::size_t i) {
      return output_merge(tape, candidate_op<OutputMergeOp>(config, BlockKind::OutputMerge, i),
                          r.h_mlp, r.h_gnn, p.output_att, &r.output_gate);
    });
  }
  r.logits = linear(tape, ops::dropout(tape, r.merged, drop, train, rng), p.classifier);
  return r;
}

ForwardResult forward_fixed(Tape& tape, const Supernet& net, const PropagationContext& ctx,
                            const NodeArchitecture& arch, Mode mode, std::mt19937_64& rng) {
  arch.validate(net.config(), ctx.num_nodes());
  FixedArchitecture source(arch, net.config());
  return forward(tape, net, ctx, source, mode, rng);
}

}  // namespace hetnas::supernet
