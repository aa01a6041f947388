// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace hetnas::supernet {

/// The seven blocks of the framework; aggregation (always ADD) has no
/// slot because it has a single candidate.
enum class BlockKind { Selection, Attention, Update, Residual, InterMerge, OutputMerge };

inline constexpr std::array<BlockKind, 6> kAllBlocks = {
    BlockKind::Selection, BlockKind::Attention,  BlockKind::Update,
    BlockKind::Residual,  BlockKind::InterMerge, BlockKind::OutputMerge};

enum class SelectionOp { OneHop = 0, OneHopLoop = 1 };
enum class AttentionOp { Const = 0, SymNorm = 1, GateFilter = 2, Signed = 3 };
enum class UpdateOp { Ego = 0, Neighbor = 1, Sum = 2, Mean = 3, Att = 4 };
enum class ResidualOp { Res = 0, Agg = 1, Sum = 2, Mean = 3, Att = 4 };
enum class InterMergeOp { Sum = 0, Mean = 1, LearnAtt = 2, NonSkip = 3 };
enum class OutputMergeOp { Mlp = 0, Gnn = 1, Sum = 2, Mean = 3, Att = 4 };

/// Two-input combine shared by the update, residual-merge and output-merge
/// blocks: First/Second pass one input through.
enum class Combine { First, Second, Sum, Mean, Att };

Combine combine_of(UpdateOp op);
Combine combine_of(ResidualOp op);
Combine combine_of(OutputMergeOp op);

/// Number of operations in the full catalog of a block.
int catalog_size(BlockKind kind);
/// Operation name as used in architecture files ("1LOOPN", "SYM_NORM", ...).
std::string_view op_name(BlockKind kind, int code);
/// Inverse of op_name; throws ParameterError for an unknown name.
int op_code(BlockKind kind, std::string_view name);
std::string_view block_tag(BlockKind kind);

template <typename Op>
int code(Op op) {
  return static_cast<int>(op);
}

/// One searchable position: a block at a layer (0-based) or a
/// network-level block (layer = -1).
struct SlotId {
  BlockKind kind = BlockKind::Selection;
  int layer = -1;

  /// "L1_O_se", ..., "O_im", "O_om".
  std::string label() const;
  auto operator<=>(const SlotId&) const = default;
};

/// All slots of an L-layer network in forward order.
std::vector<SlotId> all_slots(int layers);

}  // namespace hetnas::supernet
