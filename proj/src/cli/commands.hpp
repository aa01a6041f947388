// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hetnas/cli/cli.hpp"

namespace hetnas::cli {

int cmd_homophily(const RunConfig& config);
int cmd_search(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_hiir(const RunConfig& config);
int cmd_report(const RunConfig& config);
int cmd_synth(const graph::SynthOptions& options, const std::string& out);

}  // namespace hetnas::cli
