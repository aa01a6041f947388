// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/supernet/ops.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <vector>

namespace hetnas::supernet {

/// Shape of the supernet and the candidate operations of each block.
/// Candidate lists default to the full catalogs; they may be reordered,
/// restricted or contain duplicates.
struct SupernetConfig {
  int layers = 3;
  int hidden = 64;
  /// Dropout inside update transforms, the MLP branch and before the
  /// classifier.
  double dropout = 0.5;
  /// LEARN_ATT layer weights: one row per node, or a single shared row.
  bool node_wise_layer_weights = true;
  std::array<std::vector<int>, 6> candidates = default_candidates();

  static std::array<std::vector<int>, 6> default_candidates();

  const std::vector<int>& candidates_of(BlockKind kind) const {
    return candidates[static_cast<std::size_t>(kind)];
  }
  std::vector<int>& candidates_of(BlockKind kind) {
    return candidates[static_cast<std::size_t>(kind)];
  }

  /// Throws ParameterError on an empty or out-of-catalog list or a
  /// non-positive size.
  void validate() const;

  nlohmann::json to_json() const;
  static SupernetConfig from_json(const nlohmann::json& j);

  bool operator==(const SupernetConfig&) const = default;
};

}  // namespace hetnas::supernet
