// SPDX-License-Identifier: Apache-2.0
#include "hetnas/eval/eval.hpp"

#include <cmath>
#include <iomanip>

namespace hetnas::eval {

std::vector<BinRow> accuracy_by_homophily_bin(const Matrix& logits, const graph::Graph& g,
                                              const graph::Split& split, int n_bins) {
  if (n_bins < 1) throw ParameterError("n_bins must be at least 1");
  const auto report = graph::node_homophily(g);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n_bins));
  for (int u : split.test) {
    const auto& h = report.per_node.at(static_cast<std::size_t>(u));
    if (!h) continue;
    const int bin = std::min(static_cast<int>(std::floor(*h * n_bins)), n_bins - 1);
    members[static_cast<std::size_t>(bin)].push_back(u);
  }
  std::vector<BinRow> rows;
  for (int b = 0; b < n_bins; ++b) {
    BinRow row;
    row.lower = static_cast<double>(b) / n_bins;
    row.upper = static_cast<double>(b + 1) / n_bins;
    const auto& nodes = members[static_cast<std::size_t>(b)];
    row.count = nodes.size();
    if (!nodes.empty()) row.accuracy = accuracy(logits, g.labels(), nodes);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SlotHistogram> op_distribution(const supernet::NodeArchitecture& arch) {
  std::vector<SlotHistogram> out;
  for (const auto& slot : supernet::all_slots(arch.layers())) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(supernet::catalog_size(slot.kind)), 0);
    for (int c : arch.slot_ops(slot)) ++counts.at(static_cast<std::size_t>(c));
    SlotHistogram h;
    h.slot = slot.label();
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) continue;
      h.counts.emplace_back(std::string(supernet::op_name(slot.kind, static_cast<int>(c))), counts[c]);
    }
    out.push_back(std::move(h));
  }
  return out;
}

double MetricsTable::mean() const {
  if (splits.empty()) throw ParameterError("metrics table is empty");
  double s = 0.0;
  for (const auto& m : splits) s += m.test_accuracy;
  return s / static_cast<double>(splits.size());
}

double MetricsTable::stddev() const {
  const double mu = mean();
  double s = 0.0;
  for (const auto& m : splits) s += (m.test_accuracy - mu) * (m.test_accuracy - mu);
  return std::sqrt(s / static_cast<double>(splits.size()));
}

nlohmann::json bins_to_json(const std::vector<BinRow>& bins) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& b : bins) {
    out.push_back({{"lower", b.lower},
                   {"upper", b.upper},
                   {"count", b.count},
                   {"accuracy", b.accuracy ? nlohmann::json(*b.accuracy) : nlohmann::json(nullptr)}});
  }
  return out;
}

nlohmann::json histograms_to_json(const std::vector<SlotHistogram>& histograms) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& h : histograms) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [name, n] : h.counts) counts[name] = n;
    out[h.slot] = std::move(counts);
  }
  return out;
}

nlohmann::json MetricsTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  std::vector<double> accs;
  for (const auto& m : splits) {
    nlohmann::json row = {{"split", m.split},
                          {"test_accuracy", m.test_accuracy},
                          {"val_accuracy", m.val_accuracy}};
    if (m.h_iir) row["h_iir"] = *m.h_iir;
    if (!m.bins.empty()) row["homophily_bins"] = bins_to_json(m.bins);
    rows.push_back(std::move(row));
    accs.push_back(m.test_accuracy);
  }
  nlohmann::json out = {{"splits", std::move(rows)}, {"test_accuracies", accs}};
  if (!splits.empty()) {
    out["mean"] = mean();
    out["std"] = stddev();
  }
  if (!histograms.empty()) out["op_distribution"] = histograms_to_json(histograms);
  return out;
}

void MetricsTable::write_csv(std::ostream& out) const {
  out << "split,test_accuracy,val_accuracy,h_iir\n" << std::setprecision(17);
  for (const auto& m : splits) {
    out << m.split << ',' << m.test_accuracy << ',' << m.val_accuracy << ',';
    if (m.h_iir) out << *m.h_iir;
    out << '\n';
  }
}

}  // namespace hetnas::eval
