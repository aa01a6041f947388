// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/diff/sparse.hpp"
#include "hetnas/diff/tensor.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hetnas::graph {

using diff::Matrix;
using diff::SparseMatrix;

/// Counters collected while turning raw edge lines into a stored adjacency.
struct EdgeStats {
  std::size_t raw_edge_lines = 0;
  std::size_t self_loops_removed = 0;
  std::size_t duplicates_removed = 0;
};

/// Immutable node-classification dataset.
///
/// The stored adjacency is a 0/1 CSR matrix without self-loops and without
/// duplicate entries; it is symmetric unless the graph is directed. Row u
/// lists N(u).
class Graph {
 public:
  struct Edge {
    std::int32_t u;
    std::int32_t v;
  };

  /// Validates and assembles a graph. Undirected graphs get both
  /// directions of every edge; self-loops and duplicates are dropped and
  /// counted in `stats`.
  static Graph build(std::string name, std::size_t num_nodes, const std::vector<Edge>& edges,
                     Matrix features, std::vector<int> labels, bool directed,
                     EdgeStats* stats = nullptr);

  const std::string& name() const { return name_; }
  bool directed() const { return directed_; }
  std::size_t num_nodes() const { return labels_.size(); }
  std::size_t num_features() const { return static_cast<std::size_t>(features_.cols()); }
  int num_classes() const { return num_classes_; }

  const SparseMatrix& adjacency() const { return adjacency_; }
  /// Number of stored (directed) adjacency entries.
  std::size_t nnz() const { return adjacency_.nnz(); }
  /// Raw edge lines as ingested; equal to nnz / 2 for a symmetric graph
  /// built from unique undirected pairs.
  std::size_t raw_edge_lines() const { return stats_.raw_edge_lines; }
  const EdgeStats& edge_stats() const { return stats_; }

  const Matrix& features() const { return features_; }
  /// CSR copy of the features when they are sparse enough to profit from
  /// it (density below 25%), otherwise null.
  const SparseMatrix* sparse_features() const { return sparse_features_.get(); }

  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& degrees() const { return degrees_; }

  /// Same graph with relabelled node ids: node i becomes perm[i].
  Graph permuted(const std::vector<int>& perm) const;
  /// Copy with every feature row scaled to unit L1 norm (zero rows kept).
  Graph row_normalized() const;
  /// Copy with the given feature matrix (same row count).
  Graph with_features(Matrix features) const;

 private:
  std::string name_;
  bool directed_ = false;
  SparseMatrix adjacency_;
  Matrix features_;
  std::shared_ptr<const SparseMatrix> sparse_features_;
  std::vector<int> labels_;
  std::vector<int> degrees_;
  int num_classes_ = 0;
  EdgeStats stats_;
};

struct LoadOptions {
  /// Symmetrize even when meta.json declares the graph directed.
  bool force_symmetric = false;
  bool row_normalize_features = false;
};

/// Reads a dataset bundle directory:
///   edges.txt    one "u v" pair per line, 0-indexed
///   features.txt first line "N F", then N rows of F floats
///   labels.txt   N lines, one integer class each
///   meta.json    optional {"directed": bool, "name": string}
Graph load_dataset(const std::filesystem::path& dir, const LoadOptions& options = {});

/// Writes a bundle that load_dataset reads back into an identical graph.
void save_dataset(const Graph& g, const std::filesystem::path& dir);

// --- homophily ------------------------------------------------------------

/// Fraction of stored adjacency entries joining same-label endpoints.
/// Throws NumericalError for an edgeless graph.
double edge_homophily(const Graph& g);

struct HomophilyReport {
  std::optional<double> h_edge;
  std::optional<double> h_node;
  /// Same-label neighbour fraction per node; empty for isolated nodes.
  std::vector<std::optional<double>> per_node;
  std::size_t isolated_nodes = 0;
};

/// Per-node homophily over out-neighbours; isolated nodes are flagged and
/// excluded from the mean.
HomophilyReport node_homophily(const Graph& g);

// --- splits ---------------------------------------------------------------

struct Split {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
  std::uint64_t seed = 0;
  std::array<double, 3> fractions{};
};

enum class SmallClassPolicy {
  /// A class too small to place one node in each set is an error.
  Reject,
  /// Such classes go entirely to the training set.
  TrainOnly,
};

/// Stratified random splits: each class is shuffled and cut by the
/// fractions. Deterministic for a given seed; split k uses seed + k.
std::vector<Split> make_splits(const Graph& g, std::array<double, 3> fractions,
                               std::size_t n_splits, std::uint64_t seed,
                               SmallClassPolicy policy = SmallClassPolicy::Reject);

/// Checks disjointness and index range; throws DataError otherwise.
void validate_split(const Split& split, std::size_t num_nodes);

nlohmann::json split_to_json(const Split& split);
Split split_from_json(const nlohmann::json& j);

// --- synthetic data -------------------------------------------------------

struct SynthOptions {
  std::size_t num_nodes = 1000;
  int num_classes = 5;
  double homophily = 0.2;
  double avg_degree = 5.0;
  std::size_t feature_dim = 32;
  /// Standard deviation of the per-node noise around each class mean.
  double feature_noise = 1.0;
  std::uint64_t seed = 0;
};

/// Undirected graph with round-robin labels where every edge is
/// intra-class with probability `homophily` and otherwise joins two
/// different classes; features are Gaussian around per-class means.
Graph synth_heterophilous(const SynthOptions& options);

}  // namespace hetnas::graph
