// SPDX-License-Identifier: Apache-2.0
#include "hetnas/supernet/architecture.hpp"

#include "hetnas/errors.hpp"

#include <algorithm>
#include <string>

namespace hetnas::supernet {

NodeArchitecture::NodeArchitecture(std::size_t num_nodes, int layers, const UniformChoice& fill)
    : num_nodes_(num_nodes), layers_(layers) {
  if (layers < 1) throw ParameterError("architecture needs at least one layer");
  for (const SlotId& slot : all_slots(layers)) {
    int c = 0;
    switch (slot.kind) {
      case BlockKind::Selection: c = code(fill.selection); break;
      case BlockKind::Attention: c = code(fill.attention); break;
      case BlockKind::Update: c = code(fill.update); break;
      case BlockKind::Residual: c = code(fill.residual); break;
      case BlockKind::InterMerge: c = code(fill.inter_merge); break;
      case BlockKind::OutputMerge: c = code(fill.output_merge); break;
    }
    choices_.emplace_back(num_nodes, c);
  }
}

std::vector<std::string> NodeArchitecture::preset_names() {
  return {"gcn", "mlp", "full_skip", "bare_sum", "bare_mean"};
}

NodeArchitecture NodeArchitecture::preset(const std::string& name, std::size_t num_nodes,
                                          int layers) {
  UniformChoice u;
  if (name == "gcn") {
    u.attention = AttentionOp::SymNorm;
  } else if (name == "mlp") {
    u.residual = ResidualOp::Res;
    u.output_merge = OutputMergeOp::Mlp;
  } else if (name == "full_skip") {
    u.residual = ResidualOp::Res;
  } else if (name == "bare_sum") {
    u.update = UpdateOp::Sum;
  } else if (name == "bare_mean") {
    u.update = UpdateOp::Mean;
  } else {
    throw ParameterError("unknown architecture preset '" + name + "'");
  }
  return NodeArchitecture(num_nodes, layers, u);
}

std::size_t NodeArchitecture::ordinal(SlotId slot) const {
  if (slot.kind == BlockKind::InterMerge) return static_cast<std::size_t>(4 * layers_);
  if (slot.kind == BlockKind::OutputMerge) return static_cast<std::size_t>(4 * layers_ + 1);
  if (slot.layer < 0 || slot.layer >= layers_) {
    throw ParameterError("slot layer " + std::to_string(slot.layer) + " outside the " +
                         std::to_string(layers_) + "-layer architecture");
  }
  return static_cast<std::size_t>(4 * slot.layer + static_cast<int>(slot.kind));
}

void NodeArchitecture::validate(const SupernetConfig& config, std::size_t num_nodes) const {
  if (layers_ != config.layers) {
    throw ParameterError("architecture has " + std::to_string(layers_) +
                         " layers, config expects " + std::to_string(config.layers));
  }
  if (num_nodes_ != num_nodes) {
    throw ParameterError("architecture covers " + std::to_string(num_nodes_) +
                         " nodes, graph has " + std::to_string(num_nodes));
  }
  for (const SlotId& slot : all_slots(layers_)) {
    const auto& allowed = config.candidates_of(slot.kind);
    for (int c : slot_ops(slot)) {
      if (std::find(allowed.begin(), allowed.end(), c) == allowed.end()) {
        throw ParameterError("slot " + slot.label() + " uses operation " +
                             std::string(op_name(slot.kind, c)) +
                             " which is not among the config's candidates");
      }
    }
  }
}

NodeArchitecture NodeArchitecture::permuted(const std::vector<int>& perm) const {
  if (perm.size() != num_nodes_) throw ParameterError("permutation size mismatch");
  NodeArchitecture out = *this;
  for (std::size_t s = 0; s < choices_.size(); ++s) {
    for (std::size_t u = 0; u < num_nodes_; ++u) out.choices_[s][perm[u]] = choices_[s][u];
  }
  return out;
}

nlohmann::json NodeArchitecture::to_json(const SupernetConfig& config) const {
  nlohmann::json blocks = nlohmann::json::object();
  for (const SlotId& slot : all_slots(layers_)) {
    nlohmann::json names = nlohmann::json::array();
    for (int c : slot_ops(slot)) names.push_back(std::string(op_name(slot.kind, c)));
    blocks[slot.label()] = std::move(names);
  }
  return {{"format", "hetnas-node-architecture"},
          {"num_nodes", num_nodes_},
          {"layers", layers_},
          {"aggregation", "ADD"},
          {"config", config.to_json()},
          {"blocks", std::move(blocks)}};
}

NodeArchitecture NodeArchitecture::from_json(const nlohmann::json& j) {
  try {
    NodeArchitecture arch(j.at("num_nodes").get<std::size_t>(), j.at("layers").get<int>());
    const auto& blocks = j.at("blocks");
    for (const SlotId& slot : all_slots(arch.layers_)) {
      const auto& names = blocks.at(slot.label());
      if (names.size() != arch.num_nodes_) {
        throw ParameterError("block " + slot.label() + " lists " + std::to_string(names.size()) +
                             " nodes, expected " + std::to_string(arch.num_nodes_));
      }
      auto& ops = arch.slot_ops(slot);
      for (std::size_t u = 0; u < names.size(); ++u) {
        ops[u] = op_code(slot.kind, names[u].get<std::string>());
      }
    }
    return arch;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed architecture JSON: " + std::string(e.what()));
  }
}

SupernetConfig config_from_architecture_json(const nlohmann::json& j) {
  if (!j.contains("config")) throw ParameterError("architecture JSON carries no config echo");
  return SupernetConfig::from_json(j.at("config"));
}

}  // namespace hetnas::supernet
