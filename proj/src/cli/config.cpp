// SPDX-License-Identifier: Apache-2.0
#include "hetnas/cli/cli.hpp"

#include <fstream>

namespace hetnas::cli {

namespace {

const char* policy_name(graph::SmallClassPolicy p) {
  return p == graph::SmallClassPolicy::Reject ? "reject" : "train-only";
}

graph::SmallClassPolicy policy_from(const std::string& s) {
  if (s == "reject") return graph::SmallClassPolicy::Reject;
  if (s == "train-only") return graph::SmallClassPolicy::TrainOnly;
  throw ParameterError("small_class_policy must be \"reject\" or \"train-only\", got \"" + s + "\"");
}

}  // namespace

void RunConfig::validate() const {
  if (n_splits < 1) throw ParameterError("splits must be at least 1");
  for (double f : fractions) {
    if (!(f > 0.0)) throw ParameterError("split fractions must be positive");
  }
  if (fractions[0] + fractions[1] + fractions[2] > 1.0 + 1e-12) {
    throw ParameterError("split fractions sum to more than 1");
  }
  if (split_index && (*split_index < 0 || *split_index >= n_splits)) {
    throw ParameterError("split index " + std::to_string(*split_index) + " outside [0, " +
                         std::to_string(n_splits) + ")");
  }
  if (workers < 0) throw ParameterError("workers must be non-negative");
  if (bins < 0) throw ParameterError("bins must be non-negative");
  if (!labels.empty() && labels.size() != runs.size()) {
    throw ParameterError("labels must match the number of runs");
  }
  supernet.validate();
  search.validate();
  train.validate();
}

nlohmann::json RunConfig::to_json() const {
  return {{"dataset", dataset},
          {"out", out},
          {"splits", n_splits},
          {"seed", seed},
          {"fractions", fractions},
          {"small_class_policy", policy_name(small_classes)},
          {"symmetrize", symmetrize},
          {"row_normalize", row_normalize},
          {"split_index", split_index ? nlohmann::json(*split_index) : nlohmann::json(nullptr)},
          {"workers", workers},
          {"plots", plots},
          {"supernet", supernet.to_json()},
          {"search", search.to_json()},
          {"train", train.to_json()},
          {"arch_dir", arch_dir},
          {"fixed", fixed},
          {"model_dir", model_dir},
          {"hiir", hiir},
          {"hiir_include_mlp", hiir_include_mlp},
          {"bins", bins},
          {"runs", runs},
          {"labels", labels}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("run config must be a JSON object");
  RunConfig c;
  try {
    c.dataset = j.value("dataset", c.dataset);
    c.out = j.value("out", c.out);
    c.n_splits = j.value("splits", c.n_splits);
    c.seed = j.value("seed", c.seed);
    if (j.contains("fractions")) c.fractions = j.at("fractions").get<std::array<double, 3>>();
    c.small_classes = policy_from(j.value("small_class_policy", std::string("reject")));
    c.symmetrize = j.value("symmetrize", c.symmetrize);
    c.row_normalize = j.value("row_normalize", c.row_normalize);
    if (j.contains("split_index") && !j.at("split_index").is_null()) {
      c.split_index = j.at("split_index").get<int>();
    }
    c.workers = j.value("workers", c.workers);
    c.plots = j.value("plots", c.plots);
    // Top-level layers/hidden are accepted as shorthands.
    nlohmann::json sn = j.value("supernet", nlohmann::json::object());
    if (j.contains("layers")) sn["layers"] = j.at("layers");
    if (j.contains("hidden")) sn["hidden"] = j.at("hidden");
    c.supernet = supernet::SupernetConfig::from_json(sn);
    c.search = search::SearchConfig::from_json(j.value("search", nlohmann::json::object()));
    c.train = eval::TrainConfig::from_json(j.value("train", nlohmann::json::object()));
    c.arch_dir = j.value("arch_dir", c.arch_dir);
    c.fixed = j.value("fixed", c.fixed);
    c.model_dir = j.value("model_dir", c.model_dir);
    c.hiir = j.value("hiir", c.hiir);
    c.hiir_include_mlp = j.value("hiir_include_mlp", c.hiir_include_mlp);
    c.bins = j.value("bins", c.bins);
    c.runs = j.value("runs", c.runs);
    c.labels = j.value("labels", c.labels);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed run config: " + std::string(e.what()));
  }
  return c;
}

std::vector<graph::Split> resolve_splits(const graph::Graph& g, const RunConfig& config) {
  const auto file = std::filesystem::path(config.dataset) / "splits.json";
  if (!config.dataset.empty() && std::filesystem::exists(file)) {
    std::ifstream in(file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(file.string() + ": " + e.what());
    }
    if (!j.is_array()) throw DataError(file.string() + ": expected an array of splits");
    if (j.size() < static_cast<std::size_t>(config.n_splits)) {
      throw DataError(file.string() + " holds " + std::to_string(j.size()) + " splits, " +
                      std::to_string(config.n_splits) + " requested");
    }
    std::vector<graph::Split> out;
    for (int k = 0; k < config.n_splits; ++k) {
      auto s = graph::split_from_json(j.at(static_cast<std::size_t>(k)));
      graph::validate_split(s, g.num_nodes());
      out.push_back(std::move(s));
    }
    return out;
  }
  return graph::make_splits(g, config.fractions, static_cast<std::size_t>(config.n_splits), config.seed,
                            config.small_classes);
}

nlohmann::json with_provenance(const RunConfig& config, nlohmann::json payload) {
  nlohmann::json out = {{"tool", kToolName}, {"version", kVersion}, {"config", config.to_json()}};
  for (auto& [key, value] : payload.items()) out[key] = std::move(value);
  return out;
}

}  // namespace hetnas::cli
