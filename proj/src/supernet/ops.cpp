// SPDX-License-Identifier: Apache-2.0
#include "hetnas/supernet/ops.hpp"

#include "hetnas/errors.hpp"

#include <span>
#include <string>

namespace hetnas::supernet {

namespace {

constexpr std::array<std::string_view, 2> kSelection = {"1N", "1LOOPN"};
constexpr std::array<std::string_view, 4> kAttention = {"CONST", "SYM_NORM", "GATE_FILTER", "SIGNED"};
constexpr std::array<std::string_view, 5> kUpdate = {"EGO", "NEIGHBOR", "SUM", "MEAN", "ATT"};
constexpr std::array<std::string_view, 5> kResidual = {"RES", "AGG", "SUM", "MEAN", "ATT"};
constexpr std::array<std::string_view, 4> kInter = {"SUM", "MEAN", "LEARN_ATT", "NONSKIP"};
constexpr std::array<std::string_view, 5> kOutput = {"MLP", "GNN", "SUM", "MEAN", "ATT"};

std::span<const std::string_view> names(BlockKind kind) {
  switch (kind) {
    case BlockKind::Selection: return kSelection;
    case BlockKind::Attention: return kAttention;
    case BlockKind::Update: return kUpdate;
    case BlockKind::Residual: return kResidual;
    case BlockKind::InterMerge: return kInter;
    case BlockKind::OutputMerge: return kOutput;
  }
  throw ParameterError("unknown block kind");
}

Combine combine_by_code(int c) {
  // The three two-input blocks share the catalog layout
  // {ego-only, neighbour-only, SUM, MEAN, ATT}.
  switch (c) {
    case 0: return Combine::First;
    case 1: return Combine::Second;
    case 2: return Combine::Sum;
    case 3: return Combine::Mean;
    case 4: return Combine::Att;
  }
  throw ParameterError("unknown combine operation code " + std::to_string(c));
}

}  // namespace

Combine combine_of(UpdateOp op) { return combine_by_code(code(op)); }
Combine combine_of(ResidualOp op) { return combine_by_code(code(op)); }

Combine combine_of(OutputMergeOp op) {
  // Output-merge inputs are (h_MLP, h_GNN): MLP is the ego path.
  return combine_by_code(code(op));
}

int catalog_size(BlockKind kind) { return static_cast<int>(names(kind).size()); }

std::string_view op_name(BlockKind kind, int c) {
  const auto n = names(kind);
  if (c < 0 || c >= static_cast<int>(n.size())) {
    throw ParameterError("operation code " + std::to_string(c) + " invalid for block " +
                         std::string(block_tag(kind)));
  }
  return n[c];
}

int op_code(BlockKind kind, std::string_view name) {
  const auto n = names(kind);
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == name) return static_cast<int>(i);
  }
  // "MSG" is an accepted alias of the update block's NEIGHBOR.
  if (kind == BlockKind::Update && name == "MSG") return code(UpdateOp::Neighbor);
  throw ParameterError("unknown operation '" + std::string(name) + "' for block " +
                       std::string(block_tag(kind)));
}

std::string_view block_tag(BlockKind kind) {
  switch (kind) {
    case BlockKind::Selection: return "se";
    case BlockKind::Attention: return "att";
    case BlockKind::Update: return "update";
    case BlockKind::Residual: return "rm";
    case BlockKind::InterMerge: return "im";
    case BlockKind::OutputMerge: return "om";
  }
  return "?";
}

std::string SlotId::label() const {
  const std::string tag = "O_" + std::string(block_tag(kind));
  if (layer < 0) return tag;
  return "L" + std::to_string(layer + 1) + "_" + tag;
}

std::vector<SlotId> all_slots(int layers) {
  std::vector<SlotId> slots;
  for (int l = 0; l < layers; ++l) {
    for (auto kind : {BlockKind::Selection, BlockKind::Attention, BlockKind::Update,
                      BlockKind::Residual}) {
      slots.push_back({kind, l});
    }
  }
  slots.push_back({BlockKind::InterMerge, -1});
  slots.push_back({BlockKind::OutputMerge, -1});
  return slots;
}

}  // namespace hetnas::supernet
