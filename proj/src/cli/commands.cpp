// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace hetnas::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

graph::Graph load(const RunConfig& config) {
  if (config.dataset.empty()) throw ParameterError("--dataset is required");
  return graph::load_dataset(config.dataset, {.force_symmetric = config.symmetrize,
                                              .row_normalize_features = config.row_normalize});
}

std::vector<int> split_indices(const RunConfig& config) {
  if (config.split_index) return {*config.split_index};
  std::vector<int> out(static_cast<std::size_t>(config.n_splits));
  for (int k = 0; k < config.n_splits; ++k) out[static_cast<std::size_t>(k)] = k;
  return out;
}

std::string split_file(const std::string& stem, int k, const std::string& ext) {
  return stem + "_split" + std::to_string(k) + ext;
}

/// Runs fn(item) for every item on a bounded pool; failures are kept per
/// item, in item order.
std::vector<std::exception_ptr> parallel_for(const std::vector<int>& items, int workers,
                                             const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(items.size());
  std::size_t n_workers = workers > 0 ? static_cast<std::size_t>(workers)
                                      : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (n_workers <= 1) {
    worker();
    return errors;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return errors;
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  }
}

int exit_code_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ParameterError&) {
    return kConfigError;
  } catch (const DimensionError&) {
    return kConfigError;
  } catch (const DataError&) {
    return kDataError;
  } catch (const NumericalError&) {
    return kNumericalError;
  } catch (...) {
    return kUnexpected;
  }
}

/// Config errors abort the whole command; other per-split failures are
/// reported and the worst code is returned.
int report_failures(const std::vector<int>& items, const std::vector<std::exception_ptr>& errors,
                    const char* what) {
  int code = kOk;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!errors[i]) continue;
    const int c = exit_code_of(errors[i]);
    std::cerr << "hetnas: " << what << " split " << items[i] << " failed: " << describe(errors[i]) << "\n";
    if (c == kConfigError) std::rethrow_exception(errors[i]);
    code = std::max(code, c);
  }
  return code;
}

std::uint64_t split_seed(std::uint64_t base, const RunConfig& config, int k) {
  return base + config.seed + static_cast<std::uint64_t>(k);
}

supernet::NodeArchitecture read_architecture(const fs::path& path) {
  const auto j = read_json(path);
  return supernet::NodeArchitecture::from_json(j.contains("architecture") ? j.at("architecture") : j);
}

struct LoadedModel {
  supernet::NodeArchitecture arch;
  supernet::Supernet net;
  graph::Split split;
};

LoadedModel read_model(const fs::path& path) {
  const auto j = read_json(path);
  try {
    return {supernet::NodeArchitecture::from_json(j.at("architecture")),
            supernet::Supernet::from_json(j.at("model")), graph::split_from_json(j.at("split_nodes"))};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string run_label(const RunConfig& config) {
  if (!config.fixed.empty()) return config.fixed;
  return "searched";
}

std::vector<eval::BinRow> pool_bins(const std::vector<eval::SplitMetrics>& splits) {
  std::vector<eval::BinRow> pooled;
  std::vector<double> hits;
  for (const auto& m : splits) {
    if (pooled.empty()) {
      pooled = m.bins;
      hits.assign(pooled.size(), 0.0);
      for (auto& b : pooled) b.count = 0;
    }
    for (std::size_t b = 0; b < m.bins.size() && b < pooled.size(); ++b) {
      pooled[b].count += m.bins[b].count;
      if (m.bins[b].accuracy) hits[b] += *m.bins[b].accuracy * static_cast<double>(m.bins[b].count);
    }
  }
  for (std::size_t b = 0; b < pooled.size(); ++b) {
    pooled[b].accuracy.reset();
    if (pooled[b].count > 0) pooled[b].accuracy = hits[b] / static_cast<double>(pooled[b].count);
  }
  return pooled;
}

}  // namespace

int cmd_homophily(const RunConfig& config) {
  const auto g = load(config);
  const auto report = graph::node_homophily(g);
  if (!report.h_edge) throw NumericalError("homophily undefined: " + g.name() + " has no edges");
  const fs::path out(config.out);
  nlohmann::json payload = {
      {"dataset", g.name()},
      {"nodes", g.num_nodes()},
      {"stored_edges", g.nnz()},
      {"raw_edge_lines", g.raw_edge_lines()},
      {"directed", g.directed()},
      {"classes", g.num_classes()},
      {"h_edge", *report.h_edge},
      {"h_node", report.h_node ? nlohmann::json(*report.h_node) : nlohmann::json(nullptr)},
      {"isolated_nodes", report.isolated_nodes}};
  write_json(out / "homophily.json", with_provenance(config, payload));

  std::ostringstream csv;
  csv << "node,label,degree,h_node\n" << std::setprecision(17);
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    csv << u << ',' << g.labels()[u] << ',' << g.degrees()[u] << ',';
    if (report.per_node[u]) csv << *report.per_node[u];
    csv << '\n';
  }
  write_text(out / "homophily_nodes.csv", csv.str());
  std::cout << g.name() << ": h_edge=" << *report.h_edge;
  if (report.h_node) std::cout << " h_node=" << *report.h_node;
  std::cout << "\n";
  return kOk;
}

int cmd_synth(const graph::SynthOptions& options, const std::string& out) {
  const auto g = graph::synth_heterophilous(options);
  graph::save_dataset(g, out);
  std::cout << "wrote " << g.num_nodes() << " nodes, " << g.nnz() << " stored edges to " << out << "\n";
  return kOk;
}

int cmd_search(const RunConfig& config) {
  const auto g = load(config);
  const auto splits = resolve_splits(g, config);
  const auto items = split_indices(config);
  const fs::path out(config.out);
  fs::create_directories(out);

  std::vector<nlohmann::json> status(items.size());
  const auto errors = parallel_for(items, config.workers, [&](std::size_t i) {
    const int k = items[i];
    auto sc = config.search;
    sc.seed = split_seed(sc.seed, config, k);
    try {
      const auto result = search::search(g, splits[static_cast<std::size_t>(k)], config.supernet, sc);
      std::ostringstream trace;
      search::write_trace_csv(trace, result.trace);
      write_text(out / split_file("trace", k, ".csv"), trace.str());
      nlohmann::json payload = {{"split", k},
                                {"architecture", result.architecture.to_json(config.supernet)}};
      if (!result.trace.empty()) {
        payload["final_train_loss"] = result.trace.back().train_loss;
        payload["final_val_loss"] = result.trace.back().val_loss;
      }
      write_json(out / split_file("arch", k, ".json"), with_provenance(config, payload));
      status[i] = {{"split", k}, {"status", "ok"}};
    } catch (const search::SearchDiverged& e) {
      std::ostringstream trace;
      search::write_trace_csv(trace, e.trace());
      write_text(out / split_file("trace", k, ".csv"), trace.str());
      status[i] = {{"split", k}, {"status", "diverged"}, {"message", e.what()}};
      throw;
    }
  });
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (errors[i] && status[i].is_null()) {
      status[i] = {{"split", items[i]}, {"status", "failed"}, {"message", describe(errors[i])}};
    }
  }
  write_json(out / "search_summary.json", with_provenance(config, {{"splits", status}}));
  return report_failures(items, errors, "search");
}

int cmd_train(const RunConfig& config) {
  const auto g = load(config);
  const auto splits = resolve_splits(g, config);
  const auto items = split_indices(config);
  if (config.fixed.empty() == config.arch_dir.empty()) {
    throw ParameterError("train needs exactly one of --arch-dir and --fixed");
  }
  const fs::path out(config.out);
  fs::create_directories(out);

  std::vector<supernet::NodeArchitecture> archs;
  for (int k : items) {
    auto arch = config.fixed.empty()
                    ? read_architecture(fs::path(config.arch_dir) / split_file("arch", k, ".json"))
                    : supernet::NodeArchitecture::preset(config.fixed, g.num_nodes(), config.supernet.layers);
    arch.validate(config.supernet, g.num_nodes());
    archs.push_back(std::move(arch));
  }

  std::vector<std::optional<eval::SplitMetrics>> metrics(items.size());
  const auto errors = parallel_for(items, config.workers, [&](std::size_t i) {
    const int k = items[i];
    const auto& split = splits[static_cast<std::size_t>(k)];
    auto tc = config.train;
    tc.seed = split_seed(tc.seed, config, k);
    const auto model = eval::train(archs[i], g, split, config.supernet, tc);

    eval::SplitMetrics m;
    m.split = k;
    m.test_accuracy = eval::accuracy(model.logits, g.labels(), split.test);
    m.val_accuracy = eval::accuracy(model.logits, g.labels(), split.val);
    if (config.hiir) m.h_iir = eval::compute_hiir(model, g, {.include_mlp = config.hiir_include_mlp}).h_iir;
    if (config.bins > 0) m.bins = eval::accuracy_by_homophily_bin(model.logits, g, split, config.bins);

    std::ostringstream trace;
    trace << "epoch,train_loss,val_loss,val_accuracy\n" << std::setprecision(17);
    for (const auto& r : model.trace) {
      trace << r.epoch << ',' << r.train_loss << ',' << r.val_loss << ',' << r.val_accuracy << '\n';
    }
    write_text(out / split_file("train_trace", k, ".csv"), trace.str());
    write_json(out / split_file("model", k, ".json"),
               with_provenance(config, {{"split", k},
                                        {"best_epoch", model.best_epoch},
                                        {"split_nodes", graph::split_to_json(split)},
                                        {"architecture", model.architecture.to_json(config.supernet)},
                                        {"model", model.net.to_json()}}));
    metrics[i] = std::move(m);
  });
  const int code = report_failures(items, errors, "train");

  eval::MetricsTable table;
  for (auto& m : metrics) {
    if (m) table.splits.push_back(*m);
  }
  if (table.splits.empty()) return code == kOk ? kUnexpected : code;
  table.histograms = eval::op_distribution(archs.front());
  nlohmann::json payload = table.to_json();
  payload["label"] = run_label(config);
  write_json(out / "metrics.json", with_provenance(config, payload));
  std::ostringstream csv;
  table.write_csv(csv);
  write_text(out / "metrics.csv", csv.str());

  if (config.plots) {
    write_text(out / "op_distribution.svg", eval::svg_op_distribution(table.histograms));
    if (config.bins > 0) {
      write_text(out / "accuracy_bins.svg",
                 eval::svg_bin_accuracy(pool_bins(table.splits), "test accuracy by node homophily"));
    }
    if (config.hiir) {
      std::vector<eval::ScatterPoint> points;
      for (const auto& m : table.splits) points.push_back({run_label(config), *m.h_iir, m.test_accuracy});
      write_text(out / "accuracy_vs_hiir.svg", eval::svg_scatter(points, "h_iir", "test accuracy"));
    }
  }
  std::cout << std::fixed << std::setprecision(4) << "test accuracy " << table.mean() << " +- "
            << table.stddev() << " over " << table.splits.size() << " split(s)\n";
  return code;
}

int cmd_eval(const RunConfig& config) {
  if (config.model_dir.empty()) throw ParameterError("eval needs --model-dir");
  const auto g = load(config);
  const auto items = split_indices(config);
  std::vector<std::optional<eval::SplitMetrics>> metrics(items.size());
  const auto errors = parallel_for(items, config.workers, [&](std::size_t i) {
    const int k = items[i];
    const auto m = read_model(fs::path(config.model_dir) / split_file("model", k, ".json"));
    graph::validate_split(m.split, g.num_nodes());
    const auto logits = eval::predict(m.net, m.arch, g);
    eval::SplitMetrics row;
    row.split = k;
    row.test_accuracy = eval::accuracy(logits, g.labels(), m.split.test);
    row.val_accuracy = eval::accuracy(logits, g.labels(), m.split.val);
    if (config.bins > 0) row.bins = eval::accuracy_by_homophily_bin(logits, g, m.split, config.bins);
    metrics[i] = std::move(row);
  });
  const int code = report_failures(items, errors, "eval");
  eval::MetricsTable table;
  for (auto& m : metrics) {
    if (m) table.splits.push_back(*m);
  }
  if (table.splits.empty()) return code == kOk ? kUnexpected : code;
  const fs::path out(config.out);
  write_json(out / "eval_metrics.json", with_provenance(config, table.to_json()));
  std::ostringstream csv;
  table.write_csv(csv);
  write_text(out / "eval_metrics.csv", csv.str());
  std::cout << std::fixed << std::setprecision(4) << "test accuracy " << table.mean() << " +- "
            << table.stddev() << "\n";
  return code;
}

int cmd_hiir(const RunConfig& config) {
  if (config.model_dir.empty()) throw ParameterError("hiir needs --model-dir");
  const auto g = load(config);
  const auto items = split_indices(config);
  const fs::path out(config.out);
  std::vector<nlohmann::json> rows(items.size());
  const auto errors = parallel_for(items, config.workers, [&](std::size_t i) {
    const int k = items[i];
    const auto m = read_model(fs::path(config.model_dir) / split_file("model", k, ".json"));
    eval::FrozenRecord frozen;
    eval::predict(m.net, m.arch, g, &frozen);
    const auto z = eval::replay_labels(m.arch, m.net.config(), frozen, g, {.include_mlp = config.hiir_include_mlp});
    const auto report = eval::hiir_from_replay(z, g.labels());
    std::ostringstream csv;
    eval::write_hiir_csv(csv, report, g.labels());
    write_text(out / split_file("hiir", k, ".csv"), csv.str());
    auto row = eval::hiir_to_json(report);
    row["split"] = k;
    rows[i] = std::move(row);
  });
  const int code = report_failures(items, errors, "hiir");
  nlohmann::json done = nlohmann::json::array();
  double sum = 0.0;
  for (auto& r : rows) {
    if (r.is_null()) continue;
    sum += r.at("h_iir").get<double>();
    done.push_back(r);
  }
  if (done.empty()) return code == kOk ? kUnexpected : code;
  const double mean = sum / static_cast<double>(done.size());
  write_json(out / "hiir.json", with_provenance(config, {{"splits", done}, {"mean_h_iir", mean}}));
  std::cout << std::fixed << std::setprecision(4) << "h_iir " << mean << "\n";
  return code;
}

int cmd_report(const RunConfig& config) {
  if (config.runs.empty()) throw ParameterError("report needs at least one --runs directory");
  const fs::path out(config.out);
  nlohmann::json runs = nlohmann::json::array();
  std::vector<eval::ScatterPoint> points;
  std::ostringstream csv;
  csv << "label,mean,std,splits,mean_h_iir\n" << std::setprecision(17);
  for (std::size_t r = 0; r < config.runs.size(); ++r) {
    const fs::path dir(config.runs[r]);
    const auto metrics = read_json(dir / "metrics.json");
    const std::string label = config.labels.empty() ? metrics.value("label", dir.filename().string())
                                                    : config.labels[r];
    eval::MetricsTable table;
    std::optional<double> hiir_sum;
    try {
      for (const auto& s : metrics.at("splits")) {
        eval::SplitMetrics m;
        m.split = s.at("split").get<int>();
        m.test_accuracy = s.at("test_accuracy").get<double>();
        m.val_accuracy = s.value("val_accuracy", 0.0);
        if (s.contains("h_iir")) {
          m.h_iir = s.at("h_iir").get<double>();
          hiir_sum = hiir_sum.value_or(0.0) + *m.h_iir;
          points.push_back({label, *m.h_iir, m.test_accuracy});
        }
        table.splits.push_back(m);
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError((dir / "metrics.json").string() + ": " + e.what());
    }
    if (table.splits.empty()) throw DataError((dir / "metrics.json").string() + " lists no splits");
    nlohmann::json row = {{"label", label},
                          {"dir", dir.string()},
                          {"mean", table.mean()},
                          {"std", table.stddev()},
                          {"splits", table.splits.size()}};
    const auto n = static_cast<double>(table.splits.size());
    if (hiir_sum) row["mean_h_iir"] = *hiir_sum / n;
    if (metrics.contains("op_distribution")) row["op_distribution"] = metrics.at("op_distribution");
    csv << label << ',' << table.mean() << ',' << table.stddev() << ',' << table.splits.size() << ',';
    if (hiir_sum) csv << *hiir_sum / n;
    csv << '\n';
    runs.push_back(std::move(row));

    if (config.plots && metrics.contains("op_distribution")) {
      std::vector<eval::SlotHistogram> hist;
      for (const auto& [slot, counts] : metrics.at("op_distribution").items()) {
        eval::SlotHistogram h;
        h.slot = slot;
        for (const auto& [name, c] : counts.items()) h.counts.emplace_back(name, c.get<std::size_t>());
        hist.push_back(std::move(h));
      }
      write_text(out / ("op_distribution_" + label + ".svg"), eval::svg_op_distribution(hist));
    }
  }
  write_json(out / "report.json", with_provenance(config, {{"runs", runs}}));
  write_text(out / "report.csv", csv.str());
  if (config.plots && !points.empty()) {
    write_text(out / "accuracy_vs_hiir.svg", eval::svg_scatter(points, "h_iir", "test accuracy"));
  }
  std::cout << csv.str();
  return kOk;
}

}  // namespace hetnas::cli
