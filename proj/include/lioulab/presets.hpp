// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/expr.hpp"
#include "lioulab/frame.hpp"

#include <string>

namespace lioulab {

/// Heisenberg-Weyl frame on R^{2m+1}: points z = (x, y, t) with
/// x = (x1..xm), y = (x_{m+1}..x_{2m}), t = x_{2m+1};
/// X_i = d_{x_i} + (y_i/2) d_t, Y_i = d_{y_i} - (x_i/2) d_t, weights (1,..,1,2).
Frame heisenberg_frame(int m);

/// Grushin frame on R^2: {d_1, x1 d_2}, weights (1, 2).
Frame grushin_frame();

/// Heisenberg group law (x,y,t)*(x',y',t') =
/// (x+x', y+y', t+t' + (<y,x'> - <x,y'>)/2) as polynomials in 2n variables.
GroupLaw heisenberg_group_law(int m);

/// Abelian law x*y = x+y on R^n.
GroupLaw abelian_group_law(int n);

/// Resolves "grushin" or "heisenberg:<m>"; throws std::invalid_argument.
Frame frame_preset(const std::string& name);

/// Kaplan norm N (c = 1) and |nabla_X N|^2 = rho^2/N^2 as expression trees;
/// singular only at the origin.
ScalarExpr kaplan_norm_expr(int m);
ScalarExpr kaplan_psi_expr(int m);

/// Grushin norm N = (x1^4+x2^2)^{1/4} and its |nabla_X N|^2.
ScalarExpr grushin_norm_expr();
ScalarExpr grushin_psi_expr();

/// Exact-tail potential |nabla_X N|^2 N^-alpha for the gradient-weighted
/// model equations (singular at the origin; meant for criterion sampling).
ScalarExpr gradweight_tail_potential(const std::string& preset, double alpha);

/// The drifted Heisenberg example: Q = (1 + |nabla_X N|^2) N^-alpha and
/// b = ramp(N) N^-beta nabla_X N, where ramp vanishes on {N <= 1} and is 1
/// on {N >= 2} (only those two regions are constrained by the model).
ScalarExpr hmwithb_potential(int m, double alpha);
std::vector<ScalarExpr> hmwithb_drift(int m, double beta);

}  // namespace lioulab
