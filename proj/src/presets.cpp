// SPDX-License-Identifier: Apache-2.0
#include "lioulab/presets.hpp"

#include "lioulab/norms.hpp"

#include <stdexcept>

namespace lioulab {

Frame heisenberg_frame(int m) {
    if (m < 1) throw std::invalid_argument("heisenberg order must be >= 1");
    const int n = 2 * m + 1;
    const Rational half(1, 2);
    std::vector<PolyVectorField> fields;
    fields.reserve(static_cast<std::size_t>(2 * m));
    for (int i = 0; i < m; ++i) {
        std::vector<Polynomial> cx(static_cast<std::size_t>(n), Polynomial::zero(n));
        cx[static_cast<std::size_t>(i)] = Polynomial::constant(n, 1);
        cx[static_cast<std::size_t>(n - 1)] = Polynomial::variable(n, m + i).scaled(half);
        fields.emplace_back(std::move(cx));
    }
    for (int i = 0; i < m; ++i) {
        std::vector<Polynomial> cy(static_cast<std::size_t>(n), Polynomial::zero(n));
        cy[static_cast<std::size_t>(m + i)] = Polynomial::constant(n, 1);
        cy[static_cast<std::size_t>(n - 1)] = Polynomial::variable(n, i).scaled(-half);
        fields.emplace_back(std::move(cy));
    }
    std::vector<int> sigma(static_cast<std::size_t>(n), 1);
    sigma.back() = 2;
    return Frame(std::move(fields), DilationWeights(std::move(sigma)));
}

Frame grushin_frame() {
    const int n = 2;
    std::vector<PolyVectorField> fields;
    fields.push_back(PolyVectorField::coordinate(n, 0));
    std::vector<Polynomial> c2(2, Polynomial::zero(n));
    c2[1] = Polynomial::variable(n, 0);
    fields.emplace_back(std::move(c2));
    return Frame(std::move(fields), DilationWeights({1, 2}));
}

GroupLaw heisenberg_group_law(int m) {
    if (m < 1) throw std::invalid_argument("heisenberg order must be >= 1");
    const int n = 2 * m + 1;
    const int nn = 2 * n;
    const Rational half(1, 2);
    std::vector<Polynomial> product;
    product.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < 2 * m; ++k)
        product.push_back(Polynomial::variable(nn, k) + Polynomial::variable(nn, n + k));
    Polynomial t = Polynomial::variable(nn, n - 1) + Polynomial::variable(nn, nn - 1);
    for (int i = 0; i < m; ++i) {
        const Polynomial yi = Polynomial::variable(nn, m + i);
        const Polynomial xi = Polynomial::variable(nn, i);
        const Polynomial xpi = Polynomial::variable(nn, n + i);
        const Polynomial ypi = Polynomial::variable(nn, n + m + i);
        t = t + (yi * xpi - xi * ypi).scaled(half);
    }
    product.push_back(std::move(t));
    return GroupLaw(n, std::move(product));
}

GroupLaw abelian_group_law(int n) {
    std::vector<Polynomial> product;
    product.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        product.push_back(Polynomial::variable(2 * n, k) + Polynomial::variable(2 * n, n + k));
    return GroupLaw(n, std::move(product));
}

Frame frame_preset(const std::string& name) {
    if (name == "grushin") return grushin_frame();
    const std::string prefix = "heisenberg:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string rest = name.substr(prefix.size());
        if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad heisenberg order in preset '" + name + "'");
        return heisenberg_frame(std::stoi(rest));
    }
    throw std::invalid_argument("unknown frame preset '" + name + "'");
}

namespace {

ScalarExpr kaplan_quartic(int m) {
    const int n = 2 * m + 1;
    ScalarExpr rho2 = ScalarExpr::constant(0.0);
    for (int i = 0; i < 2 * m; ++i) {
        ScalarExpr xi = ScalarExpr::variable(i);
        rho2 = rho2 + xi * xi;
    }
    ScalarExpr t = ScalarExpr::variable(n - 1);
    return rho2 * rho2 + 16.0 * (t * t);
}

ScalarExpr kaplan_rho2(int m) {
    ScalarExpr rho2 = ScalarExpr::constant(0.0);
    for (int i = 0; i < 2 * m; ++i) {
        ScalarExpr xi = ScalarExpr::variable(i);
        rho2 = rho2 + xi * xi;
    }
    return rho2;
}

ScalarExpr grushin_quartic() {
    ScalarExpr x1 = ScalarExpr::variable(0);
    ScalarExpr x2 = ScalarExpr::variable(1);
    return pow(x1, Rational(4)) + x2 * x2;
}

// max(0, min(1, s)) within the grammar: abs encodes the clamps.
ScalarExpr clamp01(const ScalarExpr& s) {
    ScalarExpr positive = (s + abs(s)) / 2.0;
    return (positive + 1.0 - abs(positive - 1.0)) / 2.0;
}

}  // namespace

ScalarExpr kaplan_norm_expr(int m) { return pow(kaplan_quartic(m), Rational(1, 4)); }

ScalarExpr kaplan_psi_expr(int m) {
    return kaplan_rho2(m) * pow(kaplan_quartic(m), Rational(-1, 2));
}

ScalarExpr grushin_norm_expr() { return pow(grushin_quartic(), Rational(1, 4)); }

ScalarExpr grushin_psi_expr() {
    ScalarExpr x1 = ScalarExpr::variable(0);
    ScalarExpr x2 = ScalarExpr::variable(1);
    ScalarExpr num = x1 * x1 * (4.0 * pow(x1, Rational(4)) + x2 * x2) / 4.0;
    return num * pow(grushin_quartic(), Rational(-3, 2));
}

ScalarExpr gradweight_tail_potential(const std::string& preset, double alpha) {
    const Rational e = -rational_approx(alpha) / 4;
    if (preset == "grushin") return grushin_psi_expr() * pow(grushin_quartic(), e);
    const Frame f = frame_preset(preset);
    const int m = f.generators() / 2;
    return kaplan_psi_expr(m) * pow(kaplan_quartic(m), e);
}

ScalarExpr hmwithb_potential(int m, double alpha) {
    return (1.0 + kaplan_psi_expr(m)) * pow(kaplan_quartic(m), -rational_approx(alpha) / 4);
}

std::vector<ScalarExpr> hmwithb_drift(int m, double beta) {
    const Frame frame = heisenberg_frame(m);
    const ScalarExpr norm = kaplan_norm_expr(m);
    const ScalarExpr ramp = clamp01(norm - 1.0);
    const ScalarExpr scale = ramp * pow(kaplan_quartic(m), -rational_approx(beta) / 4);
    std::vector<ScalarExpr> b;
    b.reserve(static_cast<std::size_t>(frame.generators()));
    for (int i = 0; i < frame.generators(); ++i)
        b.push_back(scale * horizontal_derivative_expr(frame, i, norm));
    return b;
}

}  // namespace lioulab
