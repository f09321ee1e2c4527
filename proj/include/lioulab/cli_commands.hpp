// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace lioulab {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config seed
    int threads = 0;                    // 0 = hardware default
};

// Exit codes: 0 pass, 1 scientific failure or runtime error, 2 usage error.
int cmd_check_frame(const CliOptions& opts);
int cmd_surface_factor(const CliOptions& opts);
int cmd_criterion(const CliOptions& opts);
int cmd_solve(const CliOptions& opts);
int cmd_dichotomy(const CliOptions& opts);
int cmd_barrier(const CliOptions& opts);

/// Full argv dispatcher used by the lioulab binary.
int run_cli(int argc, const char* const* argv);

}  // namespace lioulab
