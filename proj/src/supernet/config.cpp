// SPDX-License-Identifier: Apache-2.0
#include "hetnas/supernet/config.hpp"

#include "hetnas/errors.hpp"

#include <string>

namespace hetnas::supernet {

std::array<std::vector<int>, 6> SupernetConfig::default_candidates() {
  std::array<std::vector<int>, 6> out;
  for (auto kind : kAllBlocks) {
    auto& list = out[static_cast<std::size_t>(kind)];
    for (int c = 0; c < catalog_size(kind); ++c) list.push_back(c);
  }
  return out;
}

void SupernetConfig::validate() const {
  if (layers < 1) throw ParameterError("layer count must be at least 1");
  if (hidden < 1) throw ParameterError("hidden width must be at least 1");
  if (dropout < 0.0 || dropout >= 1.0) throw ParameterError("dropout must lie in [0, 1)");
  for (auto kind : kAllBlocks) {
    const auto& list = candidates_of(kind);
    if (list.empty()) {
      throw ParameterError("empty candidate list for block " + std::string(block_tag(kind)));
    }
    for (int c : list) op_name(kind, c);
  }
}

nlohmann::json SupernetConfig::to_json() const {
  nlohmann::json cands = nlohmann::json::object();
  for (auto kind : kAllBlocks) {
    nlohmann::json names = nlohmann::json::array();
    for (int c : candidates_of(kind)) names.push_back(std::string(op_name(kind, c)));
    cands[std::string(block_tag(kind))] = names;
  }
  return {{"layers", layers},
          {"hidden", hidden},
          {"dropout", dropout},
          {"layer_weights", node_wise_layer_weights ? "node" : "global"},
          {"candidates", cands}};
}

SupernetConfig SupernetConfig::from_json(const nlohmann::json& j) {
  SupernetConfig cfg;
  try {
    cfg.layers = j.value("layers", cfg.layers);
    cfg.hidden = j.value("hidden", cfg.hidden);
    cfg.dropout = j.value("dropout", cfg.dropout);
    const auto scope = j.value("layer_weights", std::string("node"));
    if (scope != "node" && scope != "global") {
      throw ParameterError("layer_weights must be \"node\" or \"global\", got \"" + scope + "\"");
    }
    cfg.node_wise_layer_weights = scope == "node";
    if (j.contains("candidates")) {
      const auto& cands = j.at("candidates");
      for (auto kind : kAllBlocks) {
        const std::string tag(block_tag(kind));
        if (!cands.contains(tag)) continue;
        auto& list = cfg.candidates_of(kind);
        list.clear();
        for (const auto& name : cands.at(tag)) list.push_back(op_code(kind, name.get<std::string>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed supernet config: " + std::string(e.what()));
  }
  cfg.validate();
  return cfg;
}

}  // namespace hetnas::supernet
