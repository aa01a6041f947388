// SPDX-License-Identifier: Apache-2.0
#include "hetnas/graph/graph.hpp"

#include "hetnas/errors.hpp"

#include <algorithm>
#include <string>
#include <tuple>

namespace hetnas::graph {

Graph Graph::build(std::string name, std::size_t num_nodes, const std::vector<Edge>& edges,
                   Matrix features, std::vector<int> labels, bool directed, EdgeStats* stats) {
  if (labels.size() != num_nodes) {
    throw DataError("graph '" + name + "': " + std::to_string(labels.size()) + " labels for " +
                    std::to_string(num_nodes) + " nodes");
  }
  if (static_cast<std::size_t>(features.rows()) != num_nodes) {
    throw DataError("graph '" + name + "': " + std::to_string(features.rows()) +
                    " feature rows for " + std::to_string(num_nodes) + " nodes");
  }
  int max_label = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      throw DataError("graph '" + name + "': negative label at node " + std::to_string(i));
    }
    max_label = std::max(max_label, labels[i]);
  }
  if (!features.allFinite()) {
    throw DataError("graph '" + name + "': non-finite feature value");
  }

  EdgeStats local;
  local.raw_edge_lines = edges.size();
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  pairs.reserve(edges.size());
  const auto n = static_cast<std::int64_t>(num_nodes);
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw DataError("graph '" + name + "': edge (" + std::to_string(e.u) + ", " +
                      std::to_string(e.v) + ") references a node outside [0, " +
                      std::to_string(num_nodes) + ")");
    }
    if (e.u == e.v) {
      ++local.self_loops_removed;
      continue;
    }
    if (directed) {
      pairs.emplace_back(e.u, e.v);
    } else {
      pairs.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  const auto unique_end = std::unique(pairs.begin(), pairs.end());
  local.duplicates_removed = static_cast<std::size_t>(pairs.end() - unique_end);
  pairs.erase(unique_end, pairs.end());

  std::vector<std::tuple<std::int32_t, std::int32_t, double>> triplets;
  triplets.reserve(pairs.size() * (directed ? 1 : 2));
  for (const auto& [u, v] : pairs) {
    triplets.emplace_back(u, v, 1.0);
    if (!directed) triplets.emplace_back(v, u, 1.0);
  }

  Graph g;
  g.name_ = std::move(name);
  g.directed_ = directed;
  g.adjacency_ = SparseMatrix::from_triplets(static_cast<diff::Index>(num_nodes),
                                             static_cast<diff::Index>(num_nodes),
                                             std::move(triplets));
  g.degrees_.resize(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    g.degrees_[i] = static_cast<int>(g.adjacency_.row_nnz(static_cast<diff::Index>(i)));
  }
  const auto nonzero = (features.array() != 0.0).count();
  if (features.size() > 0 && static_cast<double>(nonzero) < 0.25 * static_cast<double>(features.size())) {
    g.sparse_features_ = std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(features));
  }
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  g.num_classes_ = max_label + 1;
  g.stats_ = local;
  if (stats) *stats = local;
  return g;
}

Graph Graph::permuted(const std::vector<int>& perm) const {
  const std::size_t n = num_nodes();
  if (perm.size() != n) {
    throw ParameterError("permutation has " + std::to_string(perm.size()) + " entries for " +
                         std::to_string(n) + " nodes");
  }
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= n || seen[p]) {
      throw ParameterError("not a permutation of the node ids");
    }
    seen[p] = true;
  }
  std::vector<Edge> edges;
  const auto& off = adjacency_.offsets();
  const auto& idx = adjacency_.indices();
  for (std::size_t u = 0; u < n; ++u) {
    for (auto k = off[u]; k < off[u + 1]; ++k) {
      if (directed_ || static_cast<int>(u) < idx[k]) {
        edges.push_back({perm[u], perm[idx[k]]});
      }
    }
  }
  Matrix features(features_.rows(), features_.cols());
  std::vector<int> labels(n);
  for (std::size_t u = 0; u < n; ++u) {
    features.row(perm[u]) = features_.row(static_cast<diff::Index>(u));
    labels[perm[u]] = labels_[u];
  }
  return build(name_, n, edges, std::move(features), std::move(labels), directed_);
}

Graph Graph::row_normalized() const {
  Matrix f = features_;
  for (diff::Index r = 0; r < f.rows(); ++r) {
    const double s = f.row(r).cwiseAbs().sum();
    if (s > 0.0) f.row(r) /= s;
  }
  return with_features(std::move(f));
}

Graph Graph::with_features(Matrix features) const {
  if (features.rows() != features_.rows()) {
    throw DataError("replacement features have " + std::to_string(features.rows()) +
                    " rows, graph has " + std::to_string(features_.rows()) + " nodes");
  }
  Graph g = *this;
  const auto nonzero = (features.array() != 0.0).count();
  g.sparse_features_.reset();
  if (features.size() > 0 && static_cast<double>(nonzero) < 0.25 * static_cast<double>(features.size())) {
    g.sparse_features_ = std::make_shared<const SparseMatrix>(SparseMatrix::from_dense(features));
  }
  g.features_ = std::move(features);
  return g;
}

double edge_homophily(const Graph& g) {
  const auto& adj = g.adjacency();
  if (adj.nnz() == 0) {
    throw NumericalError("edge homophily is undefined for a graph without edges");
  }
  const auto& off = adj.offsets();
  const auto& idx = adj.indices();
  const auto& y = g.labels();
  std::size_t same = 0;
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    for (auto k = off[u]; k < off[u + 1]; ++k) {
      if (y[u] == y[idx[k]]) ++same;
    }
  }
  return static_cast<double>(same) / static_cast<double>(adj.nnz());
}

HomophilyReport node_homophily(const Graph& g) {
  HomophilyReport report;
  const auto& adj = g.adjacency();
  const auto& off = adj.offsets();
  const auto& idx = adj.indices();
  const auto& y = g.labels();
  report.per_node.resize(g.num_nodes());
  double total = 0.0;
  std::size_t defined = 0;
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    const auto degree = off[u + 1] - off[u];
    if (degree == 0) {
      ++report.isolated_nodes;
      continue;
    }
    std::size_t same = 0;
    for (auto k = off[u]; k < off[u + 1]; ++k) {
      if (y[u] == y[idx[k]]) ++same;
    }
    const double ratio = static_cast<double>(same) / static_cast<double>(degree);
    report.per_node[u] = ratio;
    total += ratio;
    ++defined;
  }
  if (defined > 0) report.h_node = total / static_cast<double>(defined);
  if (adj.nnz() > 0) report.h_edge = edge_homophily(g);
  return report;
}

}  // namespace hetnas::graph
