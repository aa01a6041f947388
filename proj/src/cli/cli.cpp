// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

namespace hetnas::cli {

namespace {

/// Options are bound to private storage and copied into the RunConfig
/// only when given, so flags override the config file.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* option(const std::string& name, const std::string& desc,
                      std::function<void(RunConfig&, const T&)> set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(name, *value, desc);
    setters_.push_back([opt, value, set](RunConfig& c) {
      if (opt->count() > 0) set(c, *value);
    });
    return opt;
  }

  CLI::Option* flag(const std::string& name, const std::string& desc, std::function<void(RunConfig&)> set) {
    CLI::Option* opt = app_->add_flag(name, desc);
    setters_.push_back([opt, set](RunConfig& c) {
      if (opt->count() > 0) set(c);
    });
    return opt;
  }

  void apply(RunConfig& c) const {
    for (const auto& s : setters_) s(c);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(RunConfig&)>> setters_;
};

struct Command {
  CLI::App* app = nullptr;
  std::unique_ptr<Binder> binder;
  std::string config_file;
  std::function<int(const RunConfig&)> run;
};

void add_common(Command& cmd) {
  Binder& b = *cmd.binder;
  cmd.app->add_option("--config", cmd.config_file, "JSON run config; flags override it");
  b.option<std::string>("--dataset", "dataset bundle directory", [](RunConfig& c, const std::string& v) { c.dataset = v; });
  b.option<std::string>("--out", "output directory", [](RunConfig& c, const std::string& v) { c.out = v; });
  b.option<int>("--layers", "layer count L", [](RunConfig& c, const int& v) { c.supernet.layers = v; });
  b.option<int>("--hidden", "hidden width d", [](RunConfig& c, const int& v) { c.supernet.hidden = v; });
  b.option<double>("--dropout", "dropout rate", [](RunConfig& c, const double& v) { c.supernet.dropout = v; });
  b.option<std::string>("--layer-weights", "LEARN_ATT layer weights: node or global",
                        [](RunConfig& c, const std::string& v) {
                          if (v != "node" && v != "global") throw ParameterError("--layer-weights must be node or global");
                          c.supernet.node_wise_layer_weights = v == "node";
                        });
  b.option<int>("--splits", "number of splits", [](RunConfig& c, const int& v) { c.n_splits = v; });
  b.option<int>("--split-index", "run only this split", [](RunConfig& c, const int& v) { c.split_index = v; });
  b.option<std::uint64_t>("--seed", "base seed", [](RunConfig& c, const std::uint64_t& v) { c.seed = v; });
  b.option<std::vector<double>>("--fractions", "train val test fractions",
                                [](RunConfig& c, const std::vector<double>& v) {
                                  if (v.size() != 3) throw ParameterError("--fractions takes three values");
                                  c.fractions = {v[0], v[1], v[2]};
                                })
      ->expected(3);
  b.option<std::string>("--small-class-policy", "reject or train-only",
                        [](RunConfig& c, const std::string& v) {
                          if (v == "reject") {
                            c.small_classes = graph::SmallClassPolicy::Reject;
                          } else if (v == "train-only") {
                            c.small_classes = graph::SmallClassPolicy::TrainOnly;
                          } else {
                            throw ParameterError("--small-class-policy must be reject or train-only");
                          }
                        });
  b.flag("--symmetrize", "add reverse edges even for directed bundles", [](RunConfig& c) { c.symmetrize = true; });
  b.flag("--row-normalize", "L1-normalise feature rows", [](RunConfig& c) { c.row_normalize = true; });
  b.option<int>("--workers", "worker threads (0 = all cores)", [](RunConfig& c, const int& v) { c.workers = v; });
  b.flag("--plots", "write SVG plots", [](RunConfig& c) { c.plots = true; });
}

RunConfig resolve(const Command& cmd) {
  RunConfig config;
  if (!cmd.config_file.empty()) {
    std::ifstream in(cmd.config_file);
    if (!in) throw ParameterError("cannot read config file " + cmd.config_file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParameterError(cmd.config_file + ": " + e.what());
    }
    config = RunConfig::from_json(j);
  }
  cmd.binder->apply(config);
  config.validate();
  return config;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParameterError& e) {
    std::cerr << "hetnas: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionError& e) {
    std::cerr << "hetnas: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "hetnas: data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "hetnas: data error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericalError& e) {
    std::cerr << "hetnas: numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "hetnas: error: " << e.what() << "\n";
    return kUnexpected;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Node-wise architecture search for heterophilous graphs", kToolName};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::vector<Command> commands;
  auto add = [&](const char* name, const char* desc, std::function<int(const RunConfig&)> run) -> Command& {
    Command cmd;
    cmd.app = app.add_subcommand(name, desc);
    cmd.binder = std::make_unique<Binder>(cmd.app);
    cmd.run = std::move(run);
    // Options bind to members, so register them on the stored element.
    commands.push_back(std::move(cmd));
    add_common(commands.back());
    return commands.back();
  };
  commands.reserve(6);

  add("homophily", "edge and node homophily of a dataset", cmd_homophily);

  {
    Command& c = add("search", "search one architecture per split", cmd_search);
    Binder& b = *c.binder;
    b.option<int>("--epochs", "search epochs", [](RunConfig& r, const int& v) { r.search.epochs = v; });
    b.option<double>("--model-lr", "model learning rate", [](RunConfig& r, const double& v) { r.search.model_lr = v; });
    b.option<double>("--predictor-lr", "predictor learning rate",
                     [](RunConfig& r, const double& v) { r.search.predictor_lr = v; });
    b.option<double>("--weight-decay", "weight decay", [](RunConfig& r, const double& v) { r.search.weight_decay = v; });
    b.option<double>("--tau-start", "initial temperature", [](RunConfig& r, const double& v) { r.search.tau_start = v; });
    b.option<double>("--tau-end", "final temperature", [](RunConfig& r, const double& v) { r.search.tau_end = v; });
    b.flag("--joint", "update model and predictors together on the training loss",
           [](RunConfig& r) { r.search.joint = true; });
    b.flag("--straight-through", "hard one-hot forward, soft backward",
           [](RunConfig& r) { r.search.straight_through = true; });
  }
  {
    Command& c = add("train", "retrain searched or fixed architectures and report accuracy", cmd_train);
    Binder& b = *c.binder;
    b.option<std::string>("--arch-dir", "directory of arch_split<k>.json",
                          [](RunConfig& r, const std::string& v) { r.arch_dir = v; });
    b.option<std::string>("--fixed", "preset: gcn, mlp, full_skip, bare_sum, bare_mean",
                          [](RunConfig& r, const std::string& v) { r.fixed = v; });
    b.option<int>("--max-epochs", "epoch budget", [](RunConfig& r, const int& v) { r.train.max_epochs = v; });
    b.option<int>("--patience", "early-stopping patience", [](RunConfig& r, const int& v) { r.train.patience = v; });
    b.option<double>("--lr", "learning rate", [](RunConfig& r, const double& v) { r.train.lr = v; });
    b.option<double>("--weight-decay", "weight decay", [](RunConfig& r, const double& v) { r.train.weight_decay = v; });
    b.flag("--hiir", "add h_iir per split", [](RunConfig& r) { r.hiir = true; });
    b.flag("--exclude-mlp", "h_iir: the MLP branch contributes nothing", [](RunConfig& r) { r.hiir_include_mlp = false; });
    b.option<int>("--bins", "homophily bins for per-bin accuracy", [](RunConfig& r, const int& v) { r.bins = v; });
  }
  {
    Command& c = add("eval", "test accuracy of saved models", cmd_eval);
    c.binder->option<std::string>("--model-dir", "directory of model_split<k>.json",
                                  [](RunConfig& r, const std::string& v) { r.model_dir = v; });
    c.binder->option<int>("--bins", "homophily bins", [](RunConfig& r, const int& v) { r.bins = v; });
  }
  {
    Command& c = add("hiir", "h_iir of saved models", cmd_hiir);
    c.binder->option<std::string>("--model-dir", "directory of model_split<k>.json",
                                  [](RunConfig& r, const std::string& v) { r.model_dir = v; });
    c.binder->flag("--exclude-mlp", "the MLP branch contributes nothing",
                   [](RunConfig& r) { r.hiir_include_mlp = false; });
  }
  {
    Command& c = add("report", "combine metrics of several train runs", cmd_report);
    c.binder->option<std::vector<std::string>>("--runs", "train output directories",
                                               [](RunConfig& r, const std::vector<std::string>& v) { r.runs = v; });
    c.binder->option<std::vector<std::string>>("--labels", "one label per run",
                                               [](RunConfig& r, const std::vector<std::string>& v) { r.labels = v; });
  }

  graph::SynthOptions synth;
  std::string synth_out = ".";
  CLI::App* synth_app = app.add_subcommand("synth", "write a synthetic heterophilous dataset bundle");
  synth_app->add_option("--out", synth_out, "bundle directory");
  synth_app->add_option("--nodes", synth.num_nodes, "node count");
  synth_app->add_option("--classes", synth.num_classes, "class count");
  synth_app->add_option("--homophily", synth.homophily, "target edge homophily");
  synth_app->add_option("--avg-degree", synth.avg_degree, "average degree");
  synth_app->add_option("--feature-dim", synth.feature_dim, "feature width");
  synth_app->add_option("--feature-noise", synth.feature_noise, "feature noise std");
  synth_app->add_option("--seed", synth.seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (synth_app->parsed()) return guarded([&] { return cmd_synth(synth, synth_out); });
  for (const auto& cmd : commands) {
    if (cmd.app->parsed()) return guarded([&] { return cmd.run(resolve(cmd)); });
  }
  return kUnexpected;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{kToolName};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace hetnas::cli
