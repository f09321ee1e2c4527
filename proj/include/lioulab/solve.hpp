// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/assemble.hpp"

namespace lioulab {

struct SolveOptions {
    enum class Method { automatic, sgs, bicgstab };
    Method method = Method::automatic;
    /// Residual target, relative to (1 + |rhs|_inf + |boundary|_inf).
    double tol = 1e-8;
    long max_sweeps = 100000;
    long max_iterations = 20000;
};

struct SolveReport {
    bool converged = false;
    long iterations = 0;
    double residual = 0.0;
    double target = 0.0;
    std::string method;
};

/// Solves L u = rhs on the interior with u = boundary on boundary nodes.
/// Symmetric Gauss-Seidel sweeps by default on small grids; large grids use
/// BiCGStab preconditioned with one SGS sweep. Returns the full grid
/// function (boundary values copied through). Non-convergence is reported,
/// not thrown.
GridField solve_dirichlet(const DiscreteOperator& op, const GridField& boundary,
                          const GridField& rhs, const SolveOptions& opts = {},
                          SolveReport* report = nullptr, const GridField* initial = nullptr);

}  // namespace lioulab
