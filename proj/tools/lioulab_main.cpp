// SPDX-License-Identifier: Apache-2.0
#include "lioulab/cli_commands.hpp"

int main(int argc, char** argv) { return lioulab::run_cli(argc, argv); }
