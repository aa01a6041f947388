// SPDX-License-Identifier: Apache-2.0
#include "hetnas/errors.hpp"
#include "hetnas/graph/graph.hpp"

#include <cmath>
#include <random>
#include <set>
#include <string>

namespace hetnas::graph {

Graph synth_heterophilous(const SynthOptions& o) {
  const auto n = o.num_nodes;
  const auto c = o.num_classes;
  if (c < 2 || n < static_cast<std::size_t>(c)) {
    throw ParameterError("synthetic graph needs n >= c >= 2");
  }
  if (!(o.homophily >= 0.0 && o.homophily <= 1.0)) {
    throw ParameterError("target homophily must lie in [0, 1]");
  }
  if (!(o.avg_degree >= 1.0)) {
    throw ParameterError("average degree must be at least 1");
  }
  if (o.avg_degree >= static_cast<double>(n)) {
    throw ParameterError("average degree " + std::to_string(o.avg_degree) +
                         " is infeasible for " + std::to_string(n) + " nodes");
  }

  std::vector<int> labels(n);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(c));
  for (std::size_t u = 0; u < n; ++u) {
    labels[u] = static_cast<int>(u % static_cast<std::size_t>(c));
    members[labels[u]].push_back(static_cast<int>(u));
  }

  const auto target_edges = static_cast<std::size_t>(std::llround(static_cast<double>(n) * o.avg_degree / 2.0));
  std::size_t intra_capacity = 0;
  for (const auto& m : members) intra_capacity += m.size() * (m.size() - 1) / 2;
  if (o.homophily > 0.0 && intra_capacity == 0) {
    throw ParameterError("classes too small to place any intra-class edge");
  }
  if (o.homophily == 1.0 && target_edges > intra_capacity) {
    throw ParameterError("not enough intra-class node pairs for the requested degree");
  }

  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<std::size_t> pick_node(0, n - 1);
  std::uniform_int_distribution<int> pick_other_class(0, c - 2);
  std::bernoulli_distribution intra(o.homophily);

  std::set<std::pair<int, int>> seen;
  std::vector<Graph::Edge> edges;
  edges.reserve(target_edges);
  const std::size_t max_attempts = 100 * target_edges + 1000;
  for (std::size_t attempt = 0; edges.size() < target_edges; ++attempt) {
    if (attempt >= max_attempts) {
      throw ParameterError("could not place " + std::to_string(target_edges) +
                           " distinct edges; lower the average degree");
    }
    const int u = static_cast<int>(pick_node(rng));
    const bool same = intra(rng);
    int cls = labels[u];
    if (!same) {
      const int k = pick_other_class(rng);
      cls = k >= labels[u] ? k + 1 : k;
    }
    const auto& pool = members[cls];
    if (same && pool.size() < 2) continue;
    std::uniform_int_distribution<std::size_t> pick_member(0, pool.size() - 1);
    const int v = pool[pick_member(rng)];
    if (v == u) continue;
    const auto key = std::minmax(u, v);
    if (!seen.insert({key.first, key.second}).second) continue;
    edges.push_back({u, v});
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix means(c, static_cast<diff::Index>(o.feature_dim));
  for (diff::Index i = 0; i < means.size(); ++i) means.data()[i] = normal(rng);
  Matrix features(static_cast<diff::Index>(n), static_cast<diff::Index>(o.feature_dim));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t f = 0; f < o.feature_dim; ++f) {
      features(static_cast<diff::Index>(u), static_cast<diff::Index>(f)) =
          means(labels[u], static_cast<diff::Index>(f)) + o.feature_noise * normal(rng);
    }
  }
  return Graph::build("synthetic", n, edges, std::move(features), std::move(labels), false);
}

}  // namespace hetnas::graph
