// SPDX-License-Identifier: Apache-2.0
#include "hetnas/cli/cli.hpp"

int main(int argc, char** argv) { return hetnas::cli::run_cli(argc, argv); }
