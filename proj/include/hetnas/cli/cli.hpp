// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/eval/eval.hpp"
#include "hetnas/graph/graph.hpp"
#include "hetnas/search/search.hpp"
#include "hetnas/supernet/config.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hetnas::cli {

inline constexpr const char* kToolName = "hetnas";
inline constexpr const char* kVersion = HETNAS_VERSION;

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericalError = 4,
};

/// Everything a subcommand needs, resolved from the config file and flags.
struct RunConfig {
  std::string dataset;
  std::string out = ".";
  int n_splits = 10;
  std::uint64_t seed = 0;
  std::array<double, 3> fractions{0.48, 0.32, 0.20};
  graph::SmallClassPolicy small_classes = graph::SmallClassPolicy::Reject;
  bool symmetrize = false;
  bool row_normalize = false;
  /// Run a single split instead of all of them.
  std::optional<int> split_index;
  /// 0 means one worker per available core.
  int workers = 0;
  bool plots = false;

  supernet::SupernetConfig supernet;
  search::SearchConfig search;
  eval::TrainConfig train;

  /// train: directory of arch_split<k>.json files, or a preset name.
  std::string arch_dir;
  std::string fixed;
  /// eval / hiir: directory of model_split<k>.json files.
  std::string model_dir;
  /// train: optional sections.
  bool hiir = false;
  bool hiir_include_mlp = true;
  int bins = 0;
  /// report: run directories holding metrics.json, and their labels.
  std::vector<std::string> runs;
  std::vector<std::string> labels;

  void validate() const;
  nlohmann::json to_json() const;
  /// Keys absent from `j` keep their defaults.
  static RunConfig from_json(const nlohmann::json& j);
};

/// Splits used by a run: `splits.json` in the dataset directory when
/// present (an array of split objects), generated otherwise.
std::vector<graph::Split> resolve_splits(const graph::Graph& g, const RunConfig& config);

/// {"tool", "version", "config", ...payload}
nlohmann::json with_provenance(const RunConfig& config, nlohmann::json payload);

/// Entry point of the hetnas executable; returns an ExitCode.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace hetnas::cli
