// SPDX-License-Identifier: Apache-2.0
#include "hetnas/diff/ops.hpp"
#include "hetnas/diff/optim.hpp"
#include "hetnas/eval/eval.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace hetnas::eval {

void TrainConfig::validate() const {
  if (max_epochs < 0) throw ParameterError("max_epochs must be non-negative");
  if (patience < 1) throw ParameterError("patience must be at least 1");
  if (!(lr > 0.0)) throw ParameterError("learning rate must be positive");
  if (weight_decay < 0.0) throw ParameterError("weight decay must be non-negative");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"max_epochs", max_epochs},
          {"patience", patience},
          {"lr", lr},
          {"weight_decay", weight_decay},
          {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.lr = j.value("lr", c.lr);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed train config: " + std::string(e.what()));
  }
  c.validate();
  return c;
}

namespace {

Matrix value_or_empty(const diff::Tensor& t) { return t.defined() ? t.value() : Matrix(); }

FrozenRecord freeze(const supernet::ForwardResult& fr, const supernet::Supernet& net) {
  FrozenRecord rec;
  for (const auto& e : fr.edge_weights) rec.edge_weights.push_back(e.value());
  for (const auto& t : fr.update_gates) rec.update_gates.push_back(value_or_empty(t));
  for (const auto& t : fr.residual_gates) rec.residual_gates.push_back(value_or_empty(t));
  rec.output_gate = value_or_empty(fr.output_gate);
  rec.layer_weights = net.params().inter_weights.value();
  return rec;
}

}  // namespace

Matrix predict(const supernet::Supernet& net, const supernet::NodeArchitecture& arch,
               const graph::Graph& g, FrozenRecord* frozen) {
  const supernet::PropagationContext ctx(g);
  diff::Tape tape;
  std::mt19937_64 rng(0);
  const auto fr = supernet::forward_fixed(tape, net, ctx, arch, supernet::Mode::Eval, rng);
  if (frozen) *frozen = freeze(fr, net);
  return fr.logits.value();
}

TrainedModel train(const supernet::NodeArchitecture& arch, const graph::Graph& g,
                   const graph::Split& split, const supernet::SupernetConfig& snconfig,
                   const TrainConfig& config) {
  config.validate();
  arch.validate(snconfig, g.num_nodes());
  graph::validate_split(split, g.num_nodes());
  if (split.train.empty()) throw ParameterError("training split is empty");
  if (split.val.empty()) throw ParameterError("validation split is empty");

  const supernet::PropagationContext ctx(g);
  supernet::Supernet net(snconfig, g.num_features(), g.num_classes(), g.num_nodes(), config.seed);
  std::mt19937_64 rng(config.seed + 2);
  diff::Adam opt(net.parameters(), {.lr = config.lr, .weight_decay = config.weight_decay},
                 net.decay_mask());
  const auto& labels = g.labels();

  std::vector<TrainTraceRow> trace;
  auto best = net.snapshot();
  int best_epoch = -1;
  double best_val = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    TrainTraceRow row;
    row.epoch = epoch;
    try {
      {
        diff::Tape tape;
        const auto fr = supernet::forward_fixed(tape, net, ctx, arch, supernet::Mode::Train, rng);
        const auto loss = diff::cross_entropy_mean(tape, fr.logits, labels, split.train);
        row.train_loss = loss.item();
        tape.backward(loss);
        opt.step();
      }
      diff::Tape tape;
      std::mt19937_64 eval_rng(0);
      const auto fr = supernet::forward_fixed(tape, net, ctx, arch, supernet::Mode::Eval, eval_rng);
      row.val_loss = diff::cross_entropy_mean(tape, fr.logits, labels, split.val).item();
      row.val_accuracy = accuracy(fr.logits.value(), labels, split.val);
    } catch (const NumericalError& e) {
      throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) + ": " + e.what(),
                             trace);
    }
    trace.push_back(row);
    if (!std::isfinite(row.train_loss) || !std::isfinite(row.val_loss)) {
      throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch), trace);
    }
    if (row.val_loss < best_val) {
      best_val = row.val_loss;
      best = net.snapshot();
      best_epoch = epoch;
      stall = 0;
    } else if (++stall >= config.patience) {
      break;
    }
  }

  net.restore(best);
  FrozenRecord frozen;
  Matrix logits = predict(net, arch, g, &frozen);
  return TrainedModel{arch, std::move(net), std::move(frozen), std::move(logits), std::move(trace),
                      best_epoch};
}

double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const int> nodes) {
  if (nodes.empty()) throw ParameterError("accuracy over an empty node set");
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw DimensionError("logits have " + std::to_string(logits.rows()) + " rows for " +
                         std::to_string(labels.size()) + " labels");
  }
  std::size_t hits = 0;
  for (int u : nodes) {
    if (u < 0 || u >= logits.rows()) throw ParameterError("node " + std::to_string(u) + " out of range");
    diff::Index best = 0;
    for (diff::Index c = 1; c < logits.cols(); ++c) {
      if (logits(u, c) > logits(u, best)) best = c;
    }
    if (best == labels[static_cast<std::size_t>(u)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

double evaluate(const TrainedModel& model, const graph::Graph& g, std::span<const int> nodes) {
  return accuracy(predict(model.net, model.architecture, g), g.labels(), nodes);
}

}  // namespace hetnas::eval
