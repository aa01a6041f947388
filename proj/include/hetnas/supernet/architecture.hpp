// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/supernet/config.hpp"
#include "hetnas/supernet/ops.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace hetnas::supernet {

/// Operation chosen by every node at every slot.
struct UniformChoice {
  SelectionOp selection = SelectionOp::OneHopLoop;
  AttentionOp attention = AttentionOp::Const;
  UpdateOp update = UpdateOp::Neighbor;
  ResidualOp residual = ResidualOp::Agg;
  InterMergeOp inter_merge = InterMergeOp::NonSkip;
  OutputMergeOp output_merge = OutputMergeOp::Gnn;
};

/// Discrete per-node operation choice for every slot of the network.
/// Entries are catalog codes (see op_name), not candidate-list positions.
class NodeArchitecture {
 public:
  NodeArchitecture() = default;
  NodeArchitecture(std::size_t num_nodes, int layers, const UniformChoice& fill = {});

  /// Named fixed configurations:
  ///   gcn       1LOOPN SYM_NORM NEIGHBOR AGG NONSKIP GNN
  ///   mlp       output-merge MLP (aggregation unused)
  ///   full_skip RES everywhere, NONSKIP, GNN
  ///   bare_sum  1LOOPN CONST SUM AGG NONSKIP GNN
  ///   bare_mean 1LOOPN CONST MEAN AGG NONSKIP GNN
  static NodeArchitecture preset(const std::string& name, std::size_t num_nodes, int layers);
  static std::vector<std::string> preset_names();

  std::size_t num_nodes() const { return num_nodes_; }
  int layers() const { return layers_; }

  int op(SlotId slot, std::size_t node) const { return choices_[ordinal(slot)][node]; }
  void set(SlotId slot, std::size_t node, int code) { choices_[ordinal(slot)][node] = code; }
  const std::vector<int>& slot_ops(SlotId slot) const { return choices_[ordinal(slot)]; }
  std::vector<int>& slot_ops(SlotId slot) { return choices_[ordinal(slot)]; }

  /// Throws ParameterError if a choice is not among the config's candidates
  /// or the layer count differs.
  void validate(const SupernetConfig& config, std::size_t num_nodes) const;

  /// Node i of this architecture becomes node perm[i].
  NodeArchitecture permuted(const std::vector<int>& perm) const;

  /// {"format", "num_nodes", "layers", "config", "blocks": {label: [names]}}
  nlohmann::json to_json(const SupernetConfig& config) const;
  static NodeArchitecture from_json(const nlohmann::json& j);

  bool operator==(const NodeArchitecture&) const = default;

 private:
  std::size_t ordinal(SlotId slot) const;

  std::size_t num_nodes_ = 0;
  int layers_ = 0;
  std::vector<std::vector<int>> choices_;
};

/// Config stored alongside an architecture file.
SupernetConfig config_from_architecture_json(const nlohmann::json& j);

}  // namespace hetnas::supernet
