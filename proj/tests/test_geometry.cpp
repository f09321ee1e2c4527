// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lioulab/presets.hpp"
#include "lioulab/surface.hpp"

#include <cmath>

using namespace lioulab;

namespace {

std::vector<double> random_point(int n, double range, UniformStream& rng) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& c : x) c = rng.next(-range, range);
    return x;
}

void dilate_point(std::vector<double>& x, double lambda, const DilationWeights& w) {
    for (std::size_t j = 0; j < x.size(); ++j)
        x[j] *= std::pow(lambda, w[static_cast<int>(j)]);
}

ScalarExpr kaplan_quartic1() {
    ScalarExpr x = ScalarExpr::variable(0);
    ScalarExpr y = ScalarExpr::variable(1);
    ScalarExpr t = ScalarExpr::variable(2);
    ScalarExpr rho2 = x * x + y * y;
    return rho2 * rho2 + 16.0 * (t * t);
}

}  // namespace

TEST_CASE("kaplan norm values and homogeneity") {
    const ExhaustionNorm n1 = kaplan_norm(1);
    const std::vector<double> e1 = {1.0, 0.0, 0.0};
    const std::vector<double> et = {0.0, 0.0, 1.0};
    CHECK(n1.value(e1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(n1.value(et) == doctest::Approx(2.0).epsilon(1e-14));  // 16^(1/4)

    UniformStream rng(3);
    for (int t = 0; t < 100; ++t) {
        auto x = random_point(3, 4.0, rng);
        const double lambda = rng.next(0.2, 3.0);
        const double nx = n1.value(x);
        dilate_point(x, lambda, n1.weights);
        CHECK(n1.value(x) == doctest::Approx(lambda * nx).epsilon(1e-12));
    }

    // Scaled norm: c absorbs into the value and the unit box.
    const ExhaustionNorm n2 = kaplan_norm(1, 2.0);
    CHECK(n2.value(e1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(n2.unit_box[0] == doctest::Approx(0.5));
    CHECK(n2.unit_box[2] == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("grushin norm values and homogeneity") {
    const ExhaustionNorm n = grushin_norm();
    const std::vector<double> a = {1.0, 0.0};
    const std::vector<double> b = {0.0, 4.0};
    CHECK(n.value(a) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(n.value(b) == doctest::Approx(2.0).epsilon(1e-14));  // (16)^(1/4)

    UniformStream rng(5);
    for (int t = 0; t < 100; ++t) {
        auto x = random_point(2, 4.0, rng);
        const double lambda = rng.next(0.2, 3.0);
        const double nx = n.value(x);
        dilate_point(x, lambda, n.weights);
        CHECK(n.value(x) == doctest::Approx(lambda * nx).epsilon(1e-12));
    }
}

TEST_CASE("horizontal gradient matches the closed-form squares") {
    const Frame grushin = grushin_frame();
    const ExhaustionNorm gn = grushin_norm();
    UniformStream rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto x = random_point(2, 3.0, rng);
        if (std::abs(x[0]) < 1e-3 && std::abs(x[1]) < 1e-3) continue;
        const double n4 = x[0] * x[0] * x[0] * x[0] + x[1] * x[1];
        const double expected =
            x[0] * x[0] * (4.0 * x[0] * x[0] * x[0] * x[0] + x[1] * x[1]) /
            (4.0 * std::pow(n4, 1.5));
        CHECK(horizontal_gradient_sq(grushin, gn.expr, x) ==
              doctest::Approx(expected).epsilon(1e-12));
    }

    const Frame h1 = heisenberg_frame(1);
    const ExhaustionNorm kn = kaplan_norm(1);
    const std::vector<double> e1 = {1.0, 0.0, 0.0};
    CHECK(horizontal_gradient_sq(h1, kn.expr, e1) == doctest::Approx(1.0).epsilon(1e-12));
    for (int t = 0; t < 50; ++t) {
        const auto z = random_point(3, 3.0, rng);
        const double rho2 = z[0] * z[0] + z[1] * z[1];
        if (rho2 + z[2] * z[2] < 1e-4) continue;
        const double expected = rho2 / std::sqrt(rho2 * rho2 + 16.0 * z[2] * z[2]);
        CHECK(horizontal_gradient_sq(h1, kn.expr, z) ==
              doctest::Approx(expected).epsilon(1e-12));
    }

    // Constants have zero horizontal gradient.
    const auto g = horizontal_gradient(h1, ScalarExpr::constant(4.2), e1);
    for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("gradient square is dilation invariant (degree 0)") {
    const Frame h1 = heisenberg_frame(1);
    const ExhaustionNorm kn = kaplan_norm(1);
    const Frame gr = grushin_frame();
    const ExhaustionNorm gn = grushin_norm();
    UniformStream rng(11);
    for (int t = 0; t < 60; ++t) {
        auto z = random_point(3, 3.0, rng);
        const double lambda = rng.next(0.3, 3.0);
        const double base = horizontal_gradient_sq(h1, kn.expr, z);
        dilate_point(z, lambda, kn.weights);
        CHECK(horizontal_gradient_sq(h1, kn.expr, z) ==
              doctest::Approx(base).epsilon(1e-10));

        auto x = random_point(2, 3.0, rng);
        const double base2 = horizontal_gradient_sq(gr, gn.expr, x);
        dilate_point(x, lambda, gn.weights);
        CHECK(horizontal_gradient_sq(gr, gn.expr, x) ==
              doctest::Approx(base2).epsilon(1e-10));
    }
}

TEST_CASE("forward AD agrees with symbolic differentiation") {
    const ExhaustionNorm kn = kaplan_norm(1);
    const auto b = hmwithb_drift(1, 1.0);
    std::vector<ScalarExpr> exprs = {kn.expr, kaplan_psi_expr(1), b[0], b[1],
                                     exp(log(1.0 + kaplan_psi_expr(1)))};
    UniformStream rng(13);
    for (const auto& e : exprs) {
        std::vector<ScalarExpr> sym;
        for (int j = 0; j < 3; ++j) sym.push_back(e.derivative(j));
        for (int t = 0; t < 30; ++t) {
            const auto z = random_point(3, 4.0, rng);
            if (std::abs(kn.value(z) - 1.0) < 1e-3 || std::abs(kn.value(z) - 2.0) < 1e-3)
                continue;  // stay off the ramp kinks where |.| has no derivative
            std::vector<double> grad(3);
            double value = 0.0;
            try {
                value = e.eval_grad(z, grad);
            } catch (const EvalDomainError&) {
                continue;
            }
            CHECK(value == doctest::Approx(e.eval(z)).epsilon(1e-13));
            for (int j = 0; j < 3; ++j) {
                const double s = sym[static_cast<std::size_t>(j)].eval(z);
                CHECK(grad[static_cast<std::size_t>(j)] ==
                      doctest::Approx(s).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("expression parsing round trip and domain errors") {
    const std::vector<ScalarExpr> exprs = {kaplan_norm_expr(1), kaplan_psi_expr(1),
                                           hmwithb_potential(1, 1.5)};
    UniformStream rng(15);
    for (const auto& e : exprs) {
        const ScalarExpr back = parse_scalar_expr(e.to_string(), 3);
        for (int t = 0; t < 10; ++t) {
            const auto z = random_point(3, 3.0, rng);
            if (z[0] * z[0] + z[1] * z[1] + z[2] * z[2] < 1e-3) continue;
            CHECK(back.eval(z) == doctest::Approx(e.eval(z)).epsilon(1e-13));
        }
    }

    const ScalarExpr qhat = parse_scalar_expr("t^(-3/2)", 1, "t");
    const double two = 2.0;
    CHECK(qhat.eval(std::span<const double>(&two, 1)) ==
          doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));

    const std::vector<double> zero = {0.0};
    CHECK_THROWS_AS(parse_scalar_expr("log(x1)", 1).eval(zero), EvalDomainError);
    CHECK_THROWS_AS(parse_scalar_expr("1/x1", 1).eval(zero), EvalDomainError);
    CHECK_THROWS_AS(parse_scalar_expr("x1^(1/2)", 1).eval(std::vector<double>{-1.0}),
                    EvalDomainError);
    CHECK_THROWS_AS(parse_scalar_expr("x2", 1), std::invalid_argument);
    CHECK_THROWS_AS(parse_scalar_expr("foo(x1)", 1), std::invalid_argument);
}

TEST_CASE("horizontal divergence identities") {
    const Frame grushin = grushin_frame();
    // div_X(grad_X u) = sum X_i^2 u: for u = x1^2 both sides are 2.
    const ScalarExpr u = pow(ScalarExpr::variable(0), Rational(2));
    const auto grad_u = horizontal_gradient_expr(grushin, u);
    UniformStream rng(17);
    for (int t = 0; t < 20; ++t) {
        const auto x = random_point(2, 3.0, rng);
        CHECK(horizontal_divergence(grushin, grad_u, x) ==
              doctest::Approx(2.0).epsilon(1e-12));
    }

    // Constant F: div_X F = 0 (derivatives of constants vanish).
    const std::vector<ScalarExpr> constF = {ScalarExpr::constant(3.0),
                                            ScalarExpr::constant(-1.0)};
    const std::vector<double> pt = {0.7, -1.2};
    CHECK(horizontal_divergence(grushin, constF, pt) == 0.0);

    // Leibniz: div_X(u F) = <grad_X u, F> + u div_X F.
    const Frame h1 = heisenberg_frame(1);
    const ScalarExpr w = kaplan_psi_expr(1) + 0.5;
    const std::vector<ScalarExpr> f = {sqrt(1.0 + kaplan_psi_expr(1)),
                                       pow(1.0 + kaplan_quartic1(), Rational(-1, 4))};
    for (int t = 0; t < 25; ++t) {
        const auto z = random_point(3, 3.0, rng);
        if (z[0] * z[0] + z[1] * z[1] + z[2] * z[2] < 1e-3) continue;
        std::vector<ScalarExpr> wf;
        for (const auto& fi : f) wf.push_back(w * fi);
        const double lhs = horizontal_divergence(h1, wf, z);
        const auto gw = horizontal_gradient(h1, w, z);
        double rhs = w.eval(z) * horizontal_divergence(h1, f, z);
        for (std::size_t i = 0; i < f.size(); ++i) rhs += gw[i] * f[i].eval(z);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("drift divergence of the drifted Heisenberg example") {
    // div_X(b_beta) = (2m+1-beta) psi N^{-beta-1} on {N > 2} for m = 1:
    // the Folland-gauge identity Delta N = (D-1) psi / N with D = 2m+2,
    // cross-checked against the AD route through the ramped drift.
    const int m = 1;
    const double beta = 1.0;
    const Frame h1 = heisenberg_frame(m);
    const auto b = hmwithb_drift(m, beta);
    const ExhaustionNorm kn = kaplan_norm(m);
    UniformStream rng(19);
    int checked = 0;
    while (checked < 30) {
        const auto z = random_point(3, 6.0, rng);
        const double nv = kn.value(z);
        if (nv < 2.1) continue;
        const double psi = horizontal_gradient_sq(h1, kn.expr, z);
        const double expected = (2.0 * m + 1.0 - beta) * psi * std::pow(nv, -beta - 1.0);
        const double got = horizontal_divergence(h1, b, z);
        CHECK(got == doctest::Approx(expected).epsilon(1e-9));
        ++checked;
    }
}

TEST_CASE("homogeneous dimension") {
    CHECK(homogeneous_dimension(kaplan_norm(1).weights) == 4);  // 2m+2
    CHECK(homogeneous_dimension(kaplan_norm(2).weights) == 6);
    CHECK(homogeneous_dimension(grushin_norm().weights) == 3);
    CHECK(homogeneous_dimension(DilationWeights({1, 1, 1, 1})) == 4);  // isotropic
}

TEST_CASE("volume functional scaling") {
    const Frame h1 = heisenberg_frame(1);
    const ExhaustionNorm kn = kaplan_norm(1);
    const auto f1 = volume_functional(h1, kn, 1.0, 200000, 12345);
    const auto f2 = volume_functional(h1, kn, 2.0, 200000, 54321);
    const double ratio = f2.value / f1.value;
    const double sigma = ratio * std::sqrt(std::pow(f1.stderr_ / f1.value, 2) +
                                           std::pow(f2.stderr_ / f2.value, 2));
    CHECK(std::abs(ratio - 16.0) <= std::max(6.0 * sigma, 0.05 * 16.0));  // r^D, D = 4

    const Frame gr = grushin_frame();
    const ExhaustionNorm gn = grushin_norm();
    const auto g1 = volume_functional(gr, gn, 1.0, 200000, 7);
    const auto g2 = volume_functional(gr, gn, 2.0, 200000, 8);
    const double gratio = g2.value / g1.value;
    const double gsigma = gratio * std::sqrt(std::pow(g1.stderr_ / g1.value, 2) +
                                             std::pow(g2.stderr_ / g2.value, 2));
    CHECK(std::abs(gratio - 8.0) <= std::max(6.0 * gsigma, 0.05 * 8.0));  // D = 3

    // r -> 0+ drives F to 0.
    const auto tiny = volume_functional(h1, kn, 1e-3, 10000, 3);
    CHECK(std::abs(tiny.value) <= 1e-8);

    CHECK_THROWS_AS(volume_functional(h1, kn, 1.0, 500, 1), std::invalid_argument);
    CHECK_THROWS_AS(volume_functional(h1, kn, -1.0, 10000, 1), std::invalid_argument);

    // Determinism: the same seed reproduces the estimate bit for bit, and
    // the per-stratum reduction makes it independent of the worker count.
    const auto again = volume_functional(h1, kn, 1.0, 200000, 12345);
    CHECK(again.value == f1.value);
    const auto one_thread = volume_functional(h1, kn, 1.0, 200000, 12345, 1);
    const auto four_threads = volume_functional(h1, kn, 1.0, 200000, 12345, 4);
    CHECK(one_thread.value == f1.value);
    CHECK(four_threads.value == f1.value);
}

TEST_CASE("surface factor ratios and coarea consistency") {
    const Frame h1 = heisenberg_frame(1);
    const ExhaustionNorm kn = kaplan_norm(1);
    const auto s1 = surface_factor(h1, kn, 1.0, 300000, 101);
    const auto s2 = surface_factor(h1, kn, 2.0, 300000, 102);
    CHECK(s1.value > 0.0);
    const double ratio = s2.value / s1.value;
    CHECK(std::abs(ratio - 8.0) <= 0.08 * 8.0);  // 2^{D-1}, D = 4

    const Frame gr = grushin_frame();
    const ExhaustionNorm gn = grushin_norm();
    const auto t1 = surface_factor(gr, gn, 1.0, 300000, 103);
    const auto t2 = surface_factor(gr, gn, 2.0, 300000, 104);
    CHECK(std::abs(t2.value / t1.value - 4.0) <= 0.08 * 4.0);  // D = 3

    // Coarea: int_1^2 S dr = F(2) - F(1); Simpson is exact on the cubic S.
    const auto smid = surface_factor(h1, kn, 1.5, 300000, 105);
    const double integral = (s1.value + 4.0 * smid.value + s2.value) / 6.0;
    const auto f1 = volume_functional(h1, kn, 1.0, 400000, 106);
    const auto f2 = volume_functional(h1, kn, 2.0, 400000, 107);
    const double diff = f2.value - f1.value;
    const double sigma = std::sqrt(s1.stderr_ * s1.stderr_ + 16.0 * smid.stderr_ * smid.stderr_ +
                                   s2.stderr_ * s2.stderr_) /
                             6.0 +
                         std::sqrt(f1.stderr_ * f1.stderr_ + f2.stderr_ * f2.stderr_);
    CHECK(std::abs(integral - diff) <= std::max(6.0 * sigma, 0.03 * diff));

    CHECK_THROWS_AS(surface_factor(h1, kn, 1.0, 10000, 1, 1.5), std::invalid_argument);

    // Propagated Monte Carlo error above 20% of the estimate is an error:
    // a steep integrand at the minimum sample count triggers it.
    Frame steep(Frame::Unchecked{},
                {parse_vector_field({"x1^20", "0"}, 2), parse_vector_field({"0", "x1^20"}, 2)},
                DilationWeights({1, 2}));
    CHECK_THROWS_AS(surface_factor(steep, gn, 1.0, 1000, 3), std::runtime_error);
}

TEST_CASE("power law fit") {
    SurfaceFactorEstimate exact;
    for (double r : {1.0, 2.0, 4.0, 8.0}) {
        exact.r.push_back(r);
        exact.s.push_back(7.0 * r * r * r);
        exact.stderr_.push_back(0.0);
    }
    const PowerLawFit fit = power_law_fit(exact);
    CHECK(fit.exponent == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.log_constant == doctest::Approx(std::log(7.0)).epsilon(1e-12));

    SurfaceFactorEstimate bad = exact;
    bad.r.pop_back();
    bad.s.pop_back();
    bad.stderr_.pop_back();
    CHECK_THROWS_AS(power_law_fit(bad), std::invalid_argument);

    SurfaceFactorEstimate narrow;
    for (double r : {1.0, 1.1, 1.2, 1.3}) {
        narrow.r.push_back(r);
        narrow.s.push_back(r);
        narrow.stderr_.push_back(0.0);
    }
    CHECK_THROWS_AS(power_law_fit(narrow), std::invalid_argument);

    SurfaceFactorEstimate negative = exact;
    negative.s[1] = -1.0;
    CHECK_THROWS_AS(power_law_fit(negative), std::domain_error);
}
