// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/expr.hpp"
#include "lioulab/frame.hpp"

#include <span>
#include <string>
#include <vector>

namespace lioulab {

/// Evaluable exhaustion function N with its dilation weights. unit_box holds
/// per-axis half-widths of an axis-aligned box containing the sublevel set
/// {N < 1}; the sublevel {N < r} then sits inside the delta_r-scaled box.
struct ExhaustionNorm {
    ScalarExpr expr;
    DilationWeights weights;
    std::string singular_set_hint;
    std::vector<double> unit_box;

    int dim() const { return weights.dim(); }
    double value(std::span<const double> x) const { return expr.eval(x); }
    /// Half-width of the bounding box of {N < r} along axis j.
    double box_halfwidth(int j, double r) const;
};

/// Kaplan norm on R^{2m+1}: N(x,y,t) = c ((|x|^2+|y|^2)^2 + 16 t^2)^{1/4},
/// weights (1,...,1,2); singular set for the gradient is the origin.
ExhaustionNorm kaplan_norm(int m, double c = 1.0);

/// Grushin exhaustion norm on R^2: N(x) = (x1^4 + x2^2)^{1/4}, weights (1,2).
ExhaustionNorm grushin_norm();

/// Resolves "kaplan:<m>" or "grushin".
ExhaustionNorm norm_preset(const std::string& name);

/// D = sum sigma_i.
int homogeneous_dimension(const DilationWeights& w);

/// Horizontal gradient (X_1 u, ..., X_m u)(x) by forward AD composed with
/// the evaluated field coefficients. Throws EvalDomainError on the norm's
/// declared singular set.
std::vector<double> horizontal_gradient(const Frame& f, const ScalarExpr& u,
                                        std::span<const double> x);

/// |nabla_X u|^2(x).
double horizontal_gradient_sq(const Frame& f, const ScalarExpr& u, std::span<const double> x);

/// div_X(F) = sum_i X_i F_i at x for an m-tuple of scalar expressions.
double horizontal_divergence(const Frame& f, std::span<const ScalarExpr> F,
                             std::span<const double> x);

/// X_i u as a symbolic expression tree (field coefficients are polynomials).
ScalarExpr horizontal_derivative_expr(const Frame& f, int i, const ScalarExpr& u);

/// All of nabla_X u as symbolic trees.
std::vector<ScalarExpr> horizontal_gradient_expr(const Frame& f, const ScalarExpr& u);

}  // namespace lioulab
