// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/solve.hpp"

#include <array>
#include <cstdint>

namespace lioulab {

struct WmpReport {
    bool sign_ok = false;       // M-matrix sign pattern of the operator
    double max_node_value = 0.0;
    int trials = 0;
    bool pass = false;          // sign_ok and no node above 1e-10 in any trial
};

/// Discrete weak maximum principle: solves trials random instances with
/// boundary <= 0 and (Lu)_h >= 0 and checks u <= 1e-10 everywhere.
WmpReport wmp_test(const DiscreteOperator& op, int trials, std::uint64_t seed = 0);

struct IbpReport {
    // Per trial, the summation-by-parts defect on the base grid and two
    // refinements (max over the frame fields).
    std::vector<std::array<double, 3>> defects;
    std::vector<std::array<double, 2>> ratios;  // level i+1 / level i
    bool pass = false;                          // all ratios <= threshold
    double threshold = 0.65;
};

/// Summation-by-parts check for the scheme's upwind first-order stencil:
/// |sum_nodes (phi X_i psi + psi X_i phi) prod h| for random smooth bumps
/// vanishing near the boundary; the defect is O(h) and halves per refinement.
IbpReport discrete_ibp_test(const Frame& f, const BoxDomain& dom, int trials,
                            std::uint64_t seed = 0);

}  // namespace lioulab
