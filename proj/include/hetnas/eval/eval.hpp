// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/diff/tensor.hpp"
#include "hetnas/errors.hpp"
#include "hetnas/graph/graph.hpp"
#include "hetnas/supernet/supernet.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace hetnas::eval {

using diff::Matrix;

struct TrainConfig {
  int max_epochs = 1000;
  /// Epochs without a validation-loss improvement before stopping.
  int patience = 100;
  double lr = 0.005;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  bool operator==(const TrainConfig&) const = default;
};

struct TrainTraceRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

/// Values realised by the eval-mode forward pass of the final weights.
/// Gates are empty matrices where no node uses ATT.
struct FrozenRecord {
  std::vector<Matrix> edge_weights;  // per layer, context-pattern order
  std::vector<Matrix> update_gates;
  std::vector<Matrix> residual_gates;
  Matrix output_gate;
  Matrix layer_weights;  // LEARN_ATT weights, n x (L+1) or 1 x (L+1)
};

struct TrainedModel {
  supernet::NodeArchitecture architecture;
  supernet::Supernet net;
  FrozenRecord frozen;
  /// Eval-mode logits of the restored checkpoint.
  Matrix logits;
  std::vector<TrainTraceRow> trace;
  /// Epoch of the restored checkpoint; -1 when no epoch ran.
  int best_epoch = -1;
};

class TrainingDiverged : public NumericalError {
 public:
  TrainingDiverged(const std::string& what, std::vector<TrainTraceRow> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<TrainTraceRow>& trace() const { return trace_; }

 private:
  std::vector<TrainTraceRow> trace_;
};

/// Adam on the training loss with early stopping on validation loss;
/// returns the best-validation checkpoint.
TrainedModel train(const supernet::NodeArchitecture& arch, const graph::Graph& g,
                   const graph::Split& split, const supernet::SupernetConfig& snconfig,
                   const TrainConfig& config);

/// Eval-mode forward of `net` with `arch`; fills `frozen` when given.
Matrix predict(const supernet::Supernet& net, const supernet::NodeArchitecture& arch,
               const graph::Graph& g, FrozenRecord* frozen = nullptr);

/// Fraction of `nodes` whose argmax logit (lowest class on ties) equals the
/// label. Throws ParameterError on an empty node set.
double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const int> nodes);
double evaluate(const TrainedModel& model, const graph::Graph& g, std::span<const int> nodes);

// --- intra-class information ------------------------------------------------

struct HiirOptions {
  /// Treat the MLP branch output as Y itself; when false it contributes zero.
  bool include_mlp = true;
};

struct HiirReport {
  double h_iir = 0.0;
  /// Per node; empty for nodes whose clamped mass is below 1e-12.
  std::vector<std::optional<double>> contributions;
  std::size_t excluded = 0;
};

/// Replays the architecture on one-hot labels with the frozen edge weights
/// and gates; linear maps, relu and the MLP branch act as the identity.
/// Throws NumericalError when every node is excluded.
HiirReport compute_hiir(const TrainedModel& model, const graph::Graph& g, const HiirOptions& options = {});
/// Raw replay output z (n x C) before clamping.
Matrix replay_labels(const supernet::NodeArchitecture& arch, const supernet::SupernetConfig& config,
                     const FrozenRecord& frozen, const graph::Graph& g, const HiirOptions& options = {});
HiirReport hiir_from_replay(const Matrix& z, std::span<const int> labels);

// --- summaries ---------------------------------------------------------------

struct BinRow {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  /// Empty when no test node falls in the bin.
  std::optional<double> accuracy;
};

/// Test nodes grouped by per-node homophily into equal-width bins over
/// [0, 1]; isolated nodes are left out. The last bin is closed.
std::vector<BinRow> accuracy_by_homophily_bin(const Matrix& logits, const graph::Graph& g,
                                              const graph::Split& split, int n_bins);

struct SlotHistogram {
  std::string slot;  // "L1_O_se", ..., "O_om"
  /// Operation name and node count, catalog order, nonzero counts only.
  std::vector<std::pair<std::string, std::size_t>> counts;
};

std::vector<SlotHistogram> op_distribution(const supernet::NodeArchitecture& arch);

struct SplitMetrics {
  int split = 0;
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  std::optional<double> h_iir;
  std::vector<BinRow> bins;
};

struct MetricsTable {
  std::vector<SplitMetrics> splits;
  std::vector<SlotHistogram> histograms;  // of the first split's architecture

  double mean() const;
  /// Population standard deviation of the per-split test accuracies.
  double stddev() const;
  nlohmann::json to_json() const;
  /// split,test_accuracy,val_accuracy,h_iir
  void write_csv(std::ostream& out) const;
};

void write_hiir_csv(std::ostream& out, const HiirReport& report, std::span<const int> labels);
nlohmann::json hiir_to_json(const HiirReport& report);
nlohmann::json bins_to_json(const std::vector<BinRow>& bins);
nlohmann::json histograms_to_json(const std::vector<SlotHistogram>& histograms);

// --- plots ---------------------------------------------------------------------

std::string svg_op_distribution(const std::vector<SlotHistogram>& histograms);
std::string svg_bin_accuracy(const std::vector<BinRow>& bins, const std::string& title);

struct ScatterPoint {
  std::string label;
  double x = 0.0;  // h_iir
  double y = 0.0;  // accuracy
};
std::string svg_scatter(const std::vector<ScatterPoint>& points, const std::string& x_label,
                        const std::string& y_label);

}  // namespace hetnas::eval
