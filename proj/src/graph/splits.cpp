// SPDX-License-Identifier: Apache-2.0
#include "hetnas/errors.hpp"
#include "hetnas/graph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace hetnas::graph {

std::vector<Split> make_splits(const Graph& g, std::array<double, 3> fractions,
                               std::size_t n_splits, std::uint64_t seed, SmallClassPolicy policy) {
  for (double f : fractions) {
    if (!(f > 0.0)) {
      throw ParameterError("split fractions must all be positive (train, val and test non-empty)");
    }
  }
  const double total = fractions[0] + fractions[1] + fractions[2];
  if (total > 1.0 + 1e-9) {
    throw ParameterError("split fractions sum to " + std::to_string(total) + " > 1");
  }
  const bool complete = std::abs(total - 1.0) < 1e-9;

  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(g.num_classes()));
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    by_class[g.labels()[u]].push_back(static_cast<int>(u));
  }
  if (policy == SmallClassPolicy::Reject) {
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      if (!by_class[c].empty() && by_class[c].size() < 3) {
        throw DataError("class " + std::to_string(c) + " has only " +
                        std::to_string(by_class[c].size()) +
                        " node(s); cannot place one in each of train/val/test");
      }
    }
  }

  std::vector<Split> splits;
  splits.reserve(n_splits);
  for (std::size_t k = 0; k < n_splits; ++k) {
    Split s;
    s.seed = seed + k;
    s.fractions = fractions;
    std::mt19937_64 rng(s.seed);
    for (auto members : by_class) {
      if (members.empty()) continue;
      std::shuffle(members.begin(), members.end(), rng);
      const auto n = static_cast<long>(members.size());
      if (n < 3) {
        s.train.insert(s.train.end(), members.begin(), members.end());
        continue;
      }
      long n_train = std::max(1L, std::lround(fractions[0] * n));
      long n_val = std::max(1L, std::lround(fractions[1] * n));
      long n_test = complete ? n - n_train - n_val : std::max(1L, std::lround(fractions[2] * n));
      while (n_train + n_val + std::max(n_test, 1L) > n) {
        if (n_train > 1) {
          --n_train;
        } else {
          --n_val;
        }
        if (complete) n_test = n - n_train - n_val;
      }
      n_test = std::max(n_test, 1L);
      auto it = members.begin();
      s.train.insert(s.train.end(), it, it + n_train);
      it += n_train;
      s.val.insert(s.val.end(), it, it + n_val);
      it += n_val;
      s.test.insert(s.test.end(), it, it + n_test);
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    splits.push_back(std::move(s));
  }
  return splits;
}

void validate_split(const Split& split, std::size_t num_nodes) {
  std::vector<char> owner(num_nodes, 0);
  auto mark = [&](const std::vector<int>& set, char tag, const char* name) {
    for (int u : set) {
      if (u < 0 || static_cast<std::size_t>(u) >= num_nodes) {
        throw DataError(std::string(name) + " split references node " + std::to_string(u) +
                        " outside the graph");
      }
      if (owner[u] != 0) {
        throw DataError("node " + std::to_string(u) + " appears in more than one split set");
      }
      owner[u] = tag;
    }
  };
  mark(split.train, 1, "train");
  mark(split.val, 2, "val");
  mark(split.test, 3, "test");
}

nlohmann::json split_to_json(const Split& split) {
  return {{"train", split.train},
          {"val", split.val},
          {"test", split.test},
          {"seed", split.seed},
          {"fractions", split.fractions}};
}

Split split_from_json(const nlohmann::json& j) {
  try {
    Split s;
    s.train = j.at("train").get<std::vector<int>>();
    s.val = j.at("val").get<std::vector<int>>();
    s.test = j.at("test").get<std::vector<int>>();
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("fractions")) s.fractions = j.at("fractions").get<std::array<double, 3>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed split JSON: " + std::string(e.what()));
  }
}

}  // namespace hetnas::graph
