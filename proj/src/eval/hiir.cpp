// SPDX-License-Identifier: Apache-2.0
#include "hetnas/diff/sparse.hpp"
#include "hetnas/eval/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <string>

namespace hetnas::eval {

using supernet::BlockKind;
using supernet::Combine;
using supernet::SlotId;

namespace {

/// Row u of the two-input combine, with a frozen ATT gate.
void combine_row(Combine kind, const Matrix& x1, const Matrix& x2, const Matrix& gate,
                 diff::Index u, Matrix& out) {
  switch (kind) {
    case Combine::First: out.row(u) = x1.row(u); return;
    case Combine::Second: out.row(u) = x2.row(u); return;
    case Combine::Sum: out.row(u) = x1.row(u) + x2.row(u); return;
    case Combine::Mean: out.row(u) = 0.5 * (x1.row(u) + x2.row(u)); return;
    case Combine::Att: {
      if (gate.rows() <= u) throw DataError("frozen record lacks the ATT gate of node " + std::to_string(u));
      const double g = gate(u, 0);
      out.row(u) = g * x1.row(u) + (1.0 - g) * x2.row(u);
      return;
    }
  }
}

const Matrix& gate_at(const std::vector<Matrix>& gates, std::size_t layer) {
  static const Matrix empty;
  return layer < gates.size() ? gates[layer] : empty;
}

}  // namespace

Matrix replay_labels(const supernet::NodeArchitecture& arch, const supernet::SupernetConfig& config,
                     const FrozenRecord& frozen, const graph::Graph& g, const HiirOptions& options) {
  arch.validate(config, g.num_nodes());
  const auto n = static_cast<diff::Index>(g.num_nodes());
  const int classes = g.num_classes();
  Matrix y = Matrix::Zero(n, classes);
  for (diff::Index u = 0; u < n; ++u) y(u, g.labels()[static_cast<std::size_t>(u)]) = 1.0;

  const auto& om = arch.slot_ops({BlockKind::OutputMerge, -1});
  const bool mlp_only = std::all_of(om.begin(), om.end(), [](int c) {
    return c == supernet::code(supernet::OutputMergeOp::Mlp);
  });
  const Matrix y_mlp = options.include_mlp ? y : Matrix(Matrix::Zero(n, classes));
  if (mlp_only) return y_mlp;

  if (frozen.edge_weights.size() != static_cast<std::size_t>(config.layers)) {
    throw DataError("frozen record holds " + std::to_string(frozen.edge_weights.size()) +
                    " edge-weight layers, architecture has " + std::to_string(config.layers));
  }
  const supernet::PropagationContext ctx(g);
  std::vector<Matrix> states{y};
  Matrix h = y;
  for (int l = 0; l < config.layers; ++l) {
    const auto layer = static_cast<std::size_t>(l);
    const Matrix& e = frozen.edge_weights[layer];
    if (e.rows() != static_cast<diff::Index>(ctx.pattern().nnz())) {
      throw DataError("frozen edge weights of layer " + std::to_string(l + 1) + " do not match the graph");
    }
    const std::vector<double> values(e.data(), e.data() + e.size());
    const Matrix m = diff::sparse_times_dense(ctx.pattern().with_values(values), h);

    const auto& upd = arch.slot_ops({BlockKind::Update, l});
    const auto& res = arch.slot_ops({BlockKind::Residual, l});
    Matrix h_agg(n, classes), h_out(n, classes);
    for (diff::Index u = 0; u < n; ++u) {
      const auto su = static_cast<std::size_t>(u);
      combine_row(supernet::combine_of(static_cast<supernet::UpdateOp>(upd[su])), h, m,
                  gate_at(frozen.update_gates, layer), u, h_agg);
      combine_row(supernet::combine_of(static_cast<supernet::ResidualOp>(res[su])), h, h_agg,
                  gate_at(frozen.residual_gates, layer), u, h_out);
    }
    h = std::move(h_out);
    states.push_back(h);
  }

  const auto& im = arch.slot_ops({BlockKind::InterMerge, -1});
  const Matrix& gamma = frozen.layer_weights;
  Matrix h_gnn(n, classes);
  for (diff::Index u = 0; u < n; ++u) {
    const auto su = static_cast<std::size_t>(u);
    switch (static_cast<supernet::InterMergeOp>(im[su])) {
      case supernet::InterMergeOp::NonSkip:
        h_gnn.row(u) = states.back().row(u);
        break;
      case supernet::InterMergeOp::Sum:
      case supernet::InterMergeOp::Mean: {
        h_gnn.row(u).setZero();
        for (const auto& s : states) h_gnn.row(u) += s.row(u);
        if (static_cast<supernet::InterMergeOp>(im[su]) == supernet::InterMergeOp::Mean) {
          h_gnn.row(u) /= static_cast<double>(states.size());
        }
        break;
      }
      case supernet::InterMergeOp::LearnAtt: {
        if (gamma.cols() != static_cast<diff::Index>(states.size())) {
          throw DataError("frozen layer weights do not match the layer count");
        }
        const diff::Index gr = gamma.rows() == 1 ? 0 : u;
        h_gnn.row(u).setZero();
        for (std::size_t l = 0; l < states.size(); ++l) {
          h_gnn.row(u) += gamma(gr, static_cast<diff::Index>(l)) * states[l].row(u);
        }
        break;
      }
    }
  }

  Matrix z(n, classes);
  for (diff::Index u = 0; u < n; ++u) {
    combine_row(supernet::combine_of(static_cast<supernet::OutputMergeOp>(om[static_cast<std::size_t>(u)])),
                y_mlp, h_gnn, frozen.output_gate, u, z);
  }
  return z;
}

HiirReport hiir_from_replay(const Matrix& z, std::span<const int> labels) {
  if (static_cast<std::size_t>(z.rows()) != labels.size()) {
    throw DimensionError("replay output rows do not match the label count");
  }
  HiirReport report;
  report.contributions.resize(labels.size());
  double total = 0.0;
  std::size_t included = 0;
  for (diff::Index u = 0; u < z.rows(); ++u) {
    const Eigen::RowVectorXd clamped = z.row(u).cwiseMax(0.0);
    const double mass = clamped.sum();
    if (mass < 1e-12) {
      ++report.excluded;
      continue;
    }
    const double c = clamped(labels[static_cast<std::size_t>(u)]) / mass;
    report.contributions[static_cast<std::size_t>(u)] = c;
    total += c;
    ++included;
  }
  if (included == 0) throw NumericalError("h_iir undefined: every node has zero label mass");
  report.h_iir = total / static_cast<double>(included);
  return report;
}

HiirReport compute_hiir(const TrainedModel& model, const graph::Graph& g, const HiirOptions& options) {
  return hiir_from_replay(
      replay_labels(model.architecture, model.net.config(), model.frozen, g, options), g.labels());
}

nlohmann::json hiir_to_json(const HiirReport& report) {
  std::size_t included = 0;
  for (const auto& c : report.contributions) included += c.has_value();
  return {{"h_iir", report.h_iir}, {"included_nodes", included}, {"excluded_nodes", report.excluded}};
}

void write_hiir_csv(std::ostream& out, const HiirReport& report, std::span<const int> labels) {
  out << "node,label,contribution\n" << std::setprecision(17);
  for (std::size_t u = 0; u < report.contributions.size(); ++u) {
    out << u << ',' << labels[u] << ',';
    if (report.contributions[u]) out << *report.contributions[u];
    out << '\n';
  }
}

}  // namespace hetnas::eval
