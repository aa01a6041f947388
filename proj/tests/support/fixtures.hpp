// SPDX-License-Identifier: Apache-2.0
// Random graph generators and brute-force reference computations shared by
// the unit and acceptance suites. The reference computations are plain
// loops over dense arrays and do not use the library's kernels.
#pragma once

#include "hetnas/diff/sparse.hpp"
#include "hetnas/diff/tensor.hpp"
#include "hetnas/graph/graph.hpp"
#include "hetnas/supernet/architecture.hpp"
#include "hetnas/supernet/supernet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace hetnas::testing {

using diff::Matrix;

inline Matrix random_matrix(diff::Index rows, diff::Index cols, std::mt19937_64& rng,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (diff::Index i = 0; i < rows; ++i) {
    for (diff::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

/// Entries uniform in [lo, hi] with random sign; keeps relu/abs kinks away.
inline Matrix away_from_zero(diff::Index rows, diff::Index cols, std::mt19937_64& rng,
                             double lo = 0.1, double hi = 1.0) {
  std::uniform_real_distribution<double> mag(lo, hi);
  std::bernoulli_distribution sign(0.5);
  Matrix m(rows, cols);
  for (diff::Index i = 0; i < rows; ++i) {
    for (diff::Index j = 0; j < cols; ++j) m(i, j) = (sign(rng) ? 1.0 : -1.0) * mag(rng);
  }
  return m;
}

struct GraphSpec {
  std::size_t nodes = 20;
  double edge_prob = 0.2;
  std::size_t features = 6;
  int classes = 3;
  bool directed = false;
};

/// Erdos-Renyi graph with uniform labels (every class present) and
/// uniform features in [-1, 1].
inline graph::Graph random_graph(const GraphSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(spec.edge_prob);
  std::vector<graph::Graph::Edge> edges;
  for (std::size_t u = 0; u < spec.nodes; ++u) {
    for (std::size_t v = spec.directed ? 0 : u + 1; v < spec.nodes; ++v) {
      if (u != v && coin(rng)) edges.push_back({static_cast<int>(u), static_cast<int>(v)});
    }
  }
  std::vector<int> labels(spec.nodes);
  std::uniform_int_distribution<int> cls(0, spec.classes - 1);
  for (std::size_t u = 0; u < spec.nodes; ++u) {
    labels[u] = u < static_cast<std::size_t>(spec.classes) ? static_cast<int>(u) : cls(rng);
  }
  Matrix x = random_matrix(static_cast<diff::Index>(spec.nodes), static_cast<diff::Index>(spec.features), rng);
  return graph::Graph::build("random", spec.nodes, edges, std::move(x), std::move(labels), spec.directed);
}

/// Disjoint cliques, one per class, so every closed neighbourhood is
/// label-pure.
inline graph::Graph label_pure_graph(int classes, int clique, std::size_t features, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto n = static_cast<std::size_t>(classes * clique);
  std::vector<graph::Graph::Edge> edges;
  std::vector<int> labels(n);
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < clique; ++i) {
      labels[static_cast<std::size_t>(c * clique + i)] = c;
      for (int j = i + 1; j < clique; ++j) edges.push_back({c * clique + i, c * clique + j});
    }
  }
  Matrix x = random_matrix(static_cast<diff::Index>(n), static_cast<diff::Index>(features), rng);
  return graph::Graph::build("pure", n, edges, std::move(x), std::move(labels), false);
}

inline std::vector<int> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Random per-node choice among each block's candidates.
inline supernet::NodeArchitecture random_architecture(const supernet::SupernetConfig& config,
                                                      std::size_t n, std::mt19937_64& rng) {
  supernet::NodeArchitecture arch(n, config.layers);
  for (const auto& slot : supernet::all_slots(config.layers)) {
    const auto& cands = config.candidates_of(slot.kind);
    std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
    for (std::size_t u = 0; u < n; ++u) arch.set(slot, u, cands[pick(rng)]);
  }
  return arch;
}

/// Overwrites every model parameter with uniform values in [-scale, scale].
inline void randomize_parameters(supernet::Supernet& net, std::mt19937_64& rng, double scale = 0.5) {
  for (auto& t : net.parameters()) {
    t.mutable_value() = random_matrix(t.rows(), t.cols(), rng, -scale, scale);
  }
}

/// Architecture source with preset per-slot probability tensors.
class SoftSource : public supernet::ArchitectureSource {
 public:
  std::map<supernet::SlotId, diff::Tensor> probs;

  supernet::BlockWeights weights(diff::Tape&, const supernet::SlotId& slot,
                                 std::span<const diff::Tensor>) override {
    return supernet::BlockWeights::soft(probs.at(slot));
  }
};

/// Random strictly positive probability rows for every slot.
inline SoftSource random_soft_source(const supernet::SupernetConfig& config, std::size_t n,
                                     std::mt19937_64& rng, bool trainable) {
  SoftSource src;
  for (const auto& slot : supernet::all_slots(config.layers)) {
    const auto k = static_cast<diff::Index>(config.candidates_of(slot.kind).size());
    Matrix p = random_matrix(static_cast<diff::Index>(n), k, rng, 0.1, 1.0);
    for (diff::Index r = 0; r < p.rows(); ++r) p.row(r) /= p.row(r).sum();
    src.probs[slot] = trainable ? diff::Tensor::parameter(std::move(p)) : diff::Tensor::constant(std::move(p));
  }
  return src;
}

/// One-hot soft weights encoding `arch` (first matching candidate position).
inline SoftSource one_hot_source(const supernet::NodeArchitecture& arch, const supernet::SupernetConfig& config) {
  SoftSource src;
  for (const auto& slot : supernet::all_slots(config.layers)) {
    const auto& cands = config.candidates_of(slot.kind);
    Matrix p = Matrix::Zero(static_cast<diff::Index>(arch.num_nodes()), static_cast<diff::Index>(cands.size()));
    for (std::size_t u = 0; u < arch.num_nodes(); ++u) {
      const auto pos = std::find(cands.begin(), cands.end(), arch.op(slot, u)) - cands.begin();
      p(static_cast<diff::Index>(u), pos) = 1.0;
    }
    src.probs[slot] = diff::Tensor::constant(std::move(p));
  }
  return src;
}

/// Hop distance from `source` over stored adjacency entries (-1 if unreachable).
inline std::vector<int> bfs_distances(const graph::Graph& g, int source) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::vector<int> frontier{source};
  dist[static_cast<std::size_t>(source)] = 0;
  const auto& adj = g.adjacency();
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const int u = frontier[head];
    for (auto k = adj.offsets()[static_cast<std::size_t>(u)]; k < adj.offsets()[static_cast<std::size_t>(u) + 1]; ++k) {
      const int v = adj.indices()[static_cast<std::size_t>(k)];
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

// --- brute-force oracles ----------------------------------------------------

inline Matrix densify(const diff::SparseMatrix& s) {
  Matrix d = Matrix::Zero(s.rows(), s.cols());
  for (diff::Index r = 0; r < s.rows(); ++r) {
    for (auto k = s.offsets()[static_cast<std::size_t>(r)]; k < s.offsets()[static_cast<std::size_t>(r) + 1]; ++k) {
      d(r, s.indices()[static_cast<std::size_t>(k)]) += s.values()[static_cast<std::size_t>(k)];
    }
  }
  return d;
}

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (diff::Index i = 0; i < a.rows(); ++i) {
    for (diff::Index j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (diff::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  }
  return c;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  double m = 0.0;
  for (diff::Index i = 0; i < a.rows(); ++i) {
    for (diff::Index j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  }
  return m;
}

inline Matrix relu_of(Matrix m) {
  for (diff::Index i = 0; i < m.size(); ++i) m.data()[i] = std::max(0.0, m.data()[i]);
  return m;
}

inline Matrix affine_of(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix y = naive_matmul(x, w);
  for (diff::Index i = 0; i < y.rows(); ++i) {
    for (diff::Index j = 0; j < y.cols(); ++j) y(i, j) += b(0, j);
  }
  return y;
}

/// Dense GCN: h0 = relu(X W_in + b), h_l = relu(D^-1/2 (A+I) D^-1/2 h_{l-1} W_l + b_l),
/// logits = h_L W_c + b_c, built from the adjacency entries directly.
inline Matrix dense_gcn_logits(const supernet::Supernet& net, const graph::Graph& g) {
  const auto n = static_cast<diff::Index>(g.num_nodes());
  Matrix a = densify(g.adjacency());
  for (diff::Index i = 0; i < n; ++i) a(i, i) += 1.0;
  std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
  for (diff::Index i = 0; i < n; ++i) {
    for (diff::Index j = 0; j < n; ++j) deg[static_cast<std::size_t>(i)] += a(i, j);
  }
  Matrix norm(n, n);
  for (diff::Index i = 0; i < n; ++i) {
    for (diff::Index j = 0; j < n; ++j) {
      norm(i, j) = a(i, j) / std::sqrt(deg[static_cast<std::size_t>(i)] * deg[static_cast<std::size_t>(j)]);
    }
  }
  const auto& p = net.params();
  Matrix h = relu_of(affine_of(g.features(), p.input.weight.value(), p.input.bias.value()));
  for (const auto& layer : p.layers) {
    h = relu_of(affine_of(naive_matmul(norm, h), layer.update.weight.value(), layer.update.bias.value()));
  }
  return affine_of(h, p.classifier.weight.value(), p.classifier.bias.value());
}

inline double naive_cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                                  const std::vector<int>& mask) {
  double total = 0.0;
  for (int u : mask) {
    double z = 0.0;
    for (diff::Index c = 0; c < logits.cols(); ++c) z += std::exp(logits(u, c));
    total += std::log(z) - logits(u, labels[static_cast<std::size_t>(u)]);
  }
  return total / static_cast<double>(mask.size());
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("hetnas_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace hetnas::testing
