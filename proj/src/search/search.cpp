// SPDX-License-Identifier: Apache-2.0
#include "hetnas/search/search.hpp"

#include "hetnas/diff/ops.hpp"
#include "hetnas/diff/optim.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <string>

namespace hetnas::search {

void SearchConfig::validate() const {
  if (epochs < 0) throw ParameterError("search epochs must be non-negative");
  if (!(model_lr > 0.0) || !(predictor_lr > 0.0)) throw ParameterError("learning rates must be positive");
  if (weight_decay < 0.0) throw ParameterError("weight decay must be non-negative");
  if (!(tau_end > 0.0) || !(tau_start > 0.0)) throw ParameterError("temperatures must be positive");
  if (tau_end > tau_start) throw ParameterError("tau_end must not exceed tau_start");
}

double SearchConfig::tau_at(int epoch) const {
  if (epochs <= 1) return tau_start;
  const double t = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return tau_start * std::pow(tau_end / tau_start, t);
}

nlohmann::json SearchConfig::to_json() const {
  return {{"epochs", epochs},         {"model_lr", model_lr},   {"predictor_lr", predictor_lr},
          {"weight_decay", weight_decay}, {"tau_start", tau_start}, {"tau_end", tau_end},
          {"joint", joint},           {"straight_through", straight_through}, {"seed", seed}};
}

SearchConfig SearchConfig::from_json(const nlohmann::json& j) {
  SearchConfig c;
  try {
    c.epochs = j.value("epochs", c.epochs);
    c.model_lr = j.value("model_lr", c.model_lr);
    c.predictor_lr = j.value("predictor_lr", c.predictor_lr);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.tau_start = j.value("tau_start", c.tau_start);
    c.tau_end = j.value("tau_end", c.tau_end);
    c.joint = j.value("joint", c.joint);
    c.straight_through = j.value("straight_through", c.straight_through);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed search config: " + std::string(e.what()));
  }
  c.validate();
  return c;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "epoch,train_loss,val_loss,tau,mean_entropy\n";
  out << std::setprecision(17);
  for (const auto& r : trace) {
    out << r.epoch << ',' << r.train_loss << ',' << r.val_loss << ',' << r.tau << ','
        << r.mean_entropy << '\n';
  }
}

SearchResult search(const graph::Graph& g, const graph::Split& split,
                    const supernet::SupernetConfig& snconfig, const SearchConfig& config) {
  config.validate();
  snconfig.validate();
  graph::validate_split(split, g.num_nodes());
  if (split.train.empty()) throw ParameterError("search needs a nonempty training split");
  if (split.val.empty()) throw ParameterError("search needs a nonempty validation split");

  const supernet::PropagationContext ctx(g);
  supernet::Supernet net(snconfig, g.num_features(), g.num_classes(), g.num_nodes(), config.seed);
  PredictorSet predictors(snconfig, config.seed + 1);
  std::mt19937_64 rng(config.seed + 2);

  const auto model_params = net.parameters();
  const auto predictor_params = predictors.parameters();
  diff::Adam model_opt(model_params, {.lr = config.model_lr, .weight_decay = config.weight_decay},
                       net.decay_mask());
  diff::Adam predictor_opt(predictor_params,
                           {.lr = config.predictor_lr, .weight_decay = config.weight_decay});

  const auto& labels = g.labels();
  SearchResult result;
  auto diverged = [&](const std::string& what, int epoch) {
    throw SearchDiverged("search diverged at epoch " + std::to_string(epoch) + ": " + what,
                         result.trace);
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    TraceRow row;
    try {
      row.epoch = epoch;
      row.tau = config.tau_at(epoch);

      {
        Tape tape;
        PredictorSource source(predictors, row.tau, config.straight_through);
        const auto fr = supernet::forward(tape, net, ctx, source, supernet::Mode::Train, rng);
        const Tensor loss = diff::cross_entropy_mean(tape, fr.logits, labels, split.train);
        row.train_loss = loss.item();
        if (!std::isfinite(row.train_loss)) diverged("non-finite training loss", epoch);
        tape.backward(loss);
        model_opt.step();
        if (config.joint) {
          predictor_opt.step();
          Tape eval_tape;
          row.val_loss = diff::cross_entropy_mean(eval_tape, Tensor::constant(fr.logits.value()), labels,
                                                  split.val)
                             .item();
          row.mean_entropy = source.mix_weights().mean_entropy();
        } else {
          predictor_opt.zero_grad();
        }
      }

      if (!config.joint) {
        Tape tape;
        PredictorSource source(predictors, row.tau, config.straight_through);
        const auto fr = supernet::forward(tape, net, ctx, source, supernet::Mode::Train, rng);
        const Tensor loss = diff::cross_entropy_mean(tape, fr.logits, labels, split.val);
        row.val_loss = loss.item();
        if (!std::isfinite(row.val_loss)) diverged("non-finite validation loss", epoch);
        tape.backward(loss);
        predictor_opt.step();
        model_opt.zero_grad();
        row.mean_entropy = source.mix_weights().mean_entropy();
      }
      if (!std::isfinite(row.val_loss)) diverged("non-finite validation loss", epoch);
    } catch (const SearchDiverged&) {
      throw;
    } catch (const NumericalError& e) {
      diverged(e.what(), epoch);
    }
    result.trace.push_back(row);
  }

  Tape tape;
  PredictorSource source(predictors, config.epochs > 0 ? config.tau_at(config.epochs - 1) : config.tau_start);
  supernet::forward(tape, net, ctx, source, supernet::Mode::Eval, rng);
  result.weights = source.mix_weights();
  result.architecture = discretize(result.weights, snconfig, g.num_nodes());
  return result;
}

}  // namespace hetnas::search
