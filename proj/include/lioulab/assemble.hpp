// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/criterion.hpp"
#include "lioulab/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lioulab {

struct Csr {
    std::vector<std::int64_t> row_ptr{0};
    std::vector<std::int32_t> col;
    std::vector<double> val;

    std::int64_t rows() const { return static_cast<std::int64_t>(row_ptr.size()) - 1; }
    /// y = A x
    void matvec(std::span<const double> x, std::span<double> y) const;
};

/// Monotone discretization of L = sum X_i^2 + sum b_i X_i - Q on the
/// interior nodes of a box, stored as M = -L so the matrix carries the
/// M-matrix sign pattern: positive diagonal, nonpositive off-diagonals,
/// row sums equal to Q (weak dominance for Q >= 0).
struct DiscreteOperator {
    BoxDomain domain;
    Csr interior;   // columns are interior row numbers
    Csr boundary;   // columns are global node ids of boundary nodes
    std::vector<double> q_diag;  // Q at interior nodes
    std::string description;

    struct SignReport {
        bool diagonal_positive = false;
        bool offdiag_nonpositive = false;
        bool weakly_dominant = false;
        double worst_row_sum = 0.0;
        bool ok() const { return diagonal_positive && offdiag_nonpositive && weakly_dominant; }
    };
    SignReport sign_report() const;

    /// (L u)(interior nodes) for a full grid function, residual-style.
    std::vector<double> apply_l(const GridField& u) const;
};

struct AssembleOptions {
    /// Shrink the directional step so x +- s v stays in the closed box
    /// instead of clamping stencil positions onto it. Clamping keeps the
    /// near-boundary rows identical across nested boxes (structural
    /// inter-rung monotonicity); shrinking keeps the step symmetric.
    bool shrink_boundary_steps = false;
};

/// Directional-difference assembly: each X_i^2 u becomes the second
/// difference along h*v_i (off-grid values by clamped multilinear
/// interpolation, nonnegative weights), the coefficient correction
/// (X_i applied to its own coefficients) and the drift b_i X_i are upwinded
/// componentwise. Requires Q >= 0 on the grid; throws when the directional
/// step h*|v_i| exceeds half the box extent on some axis (grid too coarse).
DiscreteOperator assemble(const OperatorSpec& spec, const BoxDomain& dom,
                          const AssembleOptions& opts = {});

}  // namespace lioulab
