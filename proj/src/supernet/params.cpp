// SPDX-License-Identifier: Apache-2.0
#include "hetnas/errors.hpp"
#include "hetnas/supernet/supernet.hpp"

#include <cmath>
#include <string>

namespace hetnas::supernet {

namespace {

Matrix glorot(diff::Index rows, diff::Index cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (diff::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Linear make_linear(diff::Index in, diff::Index out, std::mt19937_64& rng) {
  return {Tensor::parameter(glorot(in, out, rng)), Tensor::parameter(Matrix::Zero(1, out))};
}

nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<diff::Index>();
  const auto cols = j.at("cols").get<diff::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<diff::Index>(data.size()) != rows * cols) {
    throw DataError("matrix JSON: data length does not match rows x cols");
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

}  // namespace

std::vector<std::pair<std::string, Tensor>> SupernetParams::named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("input.weight", input.weight);
  out.emplace_back("input.bias", input.bias);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l + 1) + ".";
    out.emplace_back(p + "update.weight", layers[l].update.weight);
    out.emplace_back(p + "update.bias", layers[l].update.bias);
    out.emplace_back(p + "gate", layers[l].gate);
    out.emplace_back(p + "signed_coef", layers[l].signed_coef);
    out.emplace_back(p + "update_att", layers[l].update_att);
    out.emplace_back(p + "residual_att", layers[l].residual_att);
  }
  out.emplace_back("inter_weights", inter_weights);
  out.emplace_back("mlp_hidden.weight", mlp_hidden.weight);
  out.emplace_back("mlp_hidden.bias", mlp_hidden.bias);
  out.emplace_back("mlp_out.weight", mlp_out.weight);
  out.emplace_back("mlp_out.bias", mlp_out.bias);
  out.emplace_back("output_att", output_att);
  out.emplace_back("classifier.weight", classifier.weight);
  out.emplace_back("classifier.bias", classifier.bias);
  return out;
}

std::vector<Tensor> SupernetParams::all() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named()) out.push_back(t);
  return out;
}

Supernet::Supernet(SupernetConfig config, std::size_t in_features, int num_classes,
                   std::size_t num_nodes, std::uint64_t seed)
    : config_(std::move(config)),
      in_features_(in_features),
      num_classes_(num_classes),
      num_nodes_(num_nodes) {
  config_.validate();
  if (in_features == 0) throw ParameterError("input feature width must be positive");
  if (num_classes < 1) throw ParameterError("class count must be positive");
  if (config_.node_wise_layer_weights && num_nodes == 0) {
    throw ParameterError("node-wise layer weights need a positive node count");
  }
  const auto f = static_cast<diff::Index>(in_features);
  const auto d = static_cast<diff::Index>(config_.hidden);
  std::mt19937_64 rng(seed);

  params_.input = make_linear(f, d, rng);
  for (int l = 0; l < config_.layers; ++l) {
    LayerParams lp;
    lp.update = make_linear(d, d, rng);
    lp.gate = Tensor::parameter(glorot(d, 2, rng));
    lp.signed_coef = Tensor::parameter(Matrix::Zero(1, 2));
    lp.update_att = Tensor::parameter(glorot(2 * d, 1, rng));
    lp.residual_att = Tensor::parameter(glorot(2 * d, 1, rng));
    params_.layers.push_back(std::move(lp));
  }
  const diff::Index gamma_rows =
      config_.node_wise_layer_weights ? static_cast<diff::Index>(num_nodes) : 1;
  params_.inter_weights = Tensor::parameter(
      Matrix::Constant(gamma_rows, config_.layers + 1, 1.0 / static_cast<double>(config_.layers + 1)));
  params_.mlp_hidden = make_linear(f, d, rng);
  params_.mlp_out = make_linear(d, d, rng);
  params_.output_att = Tensor::parameter(glorot(2 * d, 1, rng));
  params_.classifier = make_linear(d, num_classes, rng);
}

std::size_t Supernet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : parameters()) n += static_cast<std::size_t>(t.value().size());
  return n;
}

std::vector<bool> Supernet::decay_mask() const {
  std::vector<bool> out;
  for (const auto& [name, t] : params_.named()) out.push_back(name.ends_with(".weight"));
  return out;
}

std::vector<Matrix> Supernet::snapshot() const {
  std::vector<Matrix> out;
  for (const auto& t : parameters()) out.push_back(t.value());
  return out;
}

void Supernet::restore(const std::vector<Matrix>& values) {
  auto params = parameters();
  if (values.size() != params.size()) {
    throw ParameterError("snapshot holds " + std::to_string(values.size()) + " tensors, model has " +
                         std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (values[i].rows() != params[i].rows() || values[i].cols() != params[i].cols()) {
      throw DimensionError("snapshot tensor " + std::to_string(i) + " has shape " +
                           diff::shape_string(values[i]) + ", expected " +
                           diff::shape_string(params[i].value()));
    }
    params[i].mutable_value() = values[i];
  }
}

nlohmann::json Supernet::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, t] : params_.named()) params[name] = matrix_to_json(t.value());
  return {{"config", config_.to_json()},
          {"in_features", in_features_},
          {"num_classes", num_classes_},
          {"num_nodes", num_nodes_},
          {"params", std::move(params)}};
}

Supernet Supernet::from_json(const nlohmann::json& j) {
  try {
    Supernet net(SupernetConfig::from_json(j.at("config")), j.at("in_features").get<std::size_t>(),
                 j.at("num_classes").get<int>(), j.value("num_nodes", std::size_t{0}), 0);
    std::vector<Matrix> values;
    const auto& params = j.at("params");
    for (const auto& [name, t] : net.params_.named()) values.push_back(matrix_from_json(params.at(name)));
    net.restore(values);
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed model JSON: " + std::string(e.what()));
  }
}

}  // namespace hetnas::supernet
