// SPDX-License-Identifier: Apache-2.0
#include "lioulab/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace lioulab {

double ExhaustionNorm::box_halfwidth(int j, double r) const {
    return unit_box[static_cast<std::size_t>(j)] * std::pow(r, weights[j]);
}

ExhaustionNorm kaplan_norm(int m, double c) {
    if (m < 1) throw std::invalid_argument("kaplan norm needs m >= 1");
    if (c <= 0.0) throw std::invalid_argument("kaplan norm needs c > 0");
    const int n = 2 * m + 1;
    ScalarExpr rho2 = ScalarExpr::constant(0.0);
    for (int i = 0; i < 2 * m; ++i) {
        ScalarExpr xi = ScalarExpr::variable(i);
        rho2 = rho2 + xi * xi;
    }
    ScalarExpr t = ScalarExpr::variable(n - 1);
    ScalarExpr quartic = rho2 * rho2 + 16.0 * (t * t);
    ExhaustionNorm norm{ScalarExpr::constant(c) * pow(quartic, Rational(1, 4)),
                        DilationWeights([&] {
                            std::vector<int> s(static_cast<std::size_t>(n), 1);
                            s.back() = 2;
                            return s;
                        }()),
                        "gradient vanishes only at the origin; N is C^inf away from 0",
                        {}};
    // {N < 1} = {rho^4 + 16 t^2 < c^-4}: per-axis bounds 1/c and 1/(4c^2).
    norm.unit_box.assign(static_cast<std::size_t>(n), 1.0 / c);
    norm.unit_box.back() = 1.0 / (4.0 * c * c);
    return norm;
}

ExhaustionNorm grushin_norm() {
    ScalarExpr x1 = ScalarExpr::variable(0);
    ScalarExpr x2 = ScalarExpr::variable(1);
    ScalarExpr quartic = pow(x1, Rational(4)) + x2 * x2;
    return ExhaustionNorm{pow(quartic, Rational(1, 4)), DilationWeights({1, 2}),
                          "gradient vanishes only at the origin; N is C^inf away from 0",
                          {1.0, 1.0}};
}

ExhaustionNorm norm_preset(const std::string& name) {
    if (name == "grushin") return grushin_norm();
    const std::string prefix = "kaplan:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string rest = name.substr(prefix.size());
        if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad kaplan order in preset '" + name + "'");
        return kaplan_norm(std::stoi(rest));
    }
    throw std::invalid_argument("unknown norm preset '" + name + "'");
}

int homogeneous_dimension(const DilationWeights& w) { return w.homogeneous_dimension(); }

std::vector<double> horizontal_gradient(const Frame& f, const ScalarExpr& u,
                                        std::span<const double> x) {
    if (static_cast<int>(x.size()) != f.dim())
        throw std::invalid_argument("point dimension mismatch");
    std::vector<double> grad(x.size());
    u.eval_grad(x, grad);
    std::vector<double> out(static_cast<std::size_t>(f.generators()));
    std::vector<double> v(x.size());
    for (int i = 0; i < f.generators(); ++i) {
        f.field(i).evaluate(x, v);
        double acc = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) acc += v[j] * grad[j];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

double horizontal_gradient_sq(const Frame& f, const ScalarExpr& u, std::span<const double> x) {
    double acc = 0.0;
    for (double g : horizontal_gradient(f, u, x)) acc += g * g;
    return acc;
}

double horizontal_divergence(const Frame& f, std::span<const ScalarExpr> F,
                             std::span<const double> x) {
    if (static_cast<int>(F.size()) != f.generators())
        throw std::invalid_argument("div_X needs one component per generator");
    std::vector<double> grad(x.size());
    std::vector<double> v(x.size());
    double acc = 0.0;
    for (int i = 0; i < f.generators(); ++i) {
        F[static_cast<std::size_t>(i)].eval_grad(x, grad);
        f.field(i).evaluate(x, v);
        for (std::size_t j = 0; j < v.size(); ++j) acc += v[j] * grad[j];
    }
    return acc;
}

ScalarExpr horizontal_derivative_expr(const Frame& f, int i, const ScalarExpr& u) {
    ScalarExpr acc = ScalarExpr::constant(0.0);
    for (int j = 0; j < f.dim(); ++j) {
        const Polynomial& aj = f.field(i).coeff(j);
        if (aj.is_zero()) continue;
        acc = acc + poly_to_expr(aj) * u.derivative(j);
    }
    return acc;
}

std::vector<ScalarExpr> horizontal_gradient_expr(const Frame& f, const ScalarExpr& u) {
    std::vector<ScalarExpr> out;
    out.reserve(static_cast<std::size_t>(f.generators()));
    for (int i = 0; i < f.generators(); ++i) out.push_back(horizontal_derivative_expr(f, i, u));
    return out;
}

}  // namespace lioulab
