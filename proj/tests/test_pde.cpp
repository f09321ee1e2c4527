// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lioulab/invading.hpp"
#include "lioulab/pde_checks.hpp"
#include "lioulab/presets.hpp"

#include <cmath>

using namespace lioulab;

namespace {

// Random frame with constant + linear coefficients, used for the sign and
// maximum-principle property tests (no homogeneity requirements).
Frame random_test_frame(int n, UniformStream& rng) {
    std::vector<PolyVectorField> fields;
    for (int f = 0; f < 2; ++f) {
        std::vector<Polynomial> coeffs;
        for (int j = 0; j < n; ++j) {
            Polynomial p = Polynomial::constant(
                n, Rational(static_cast<long>(rng.next() * 9) - 4, 4));
            for (int k = 0; k < n; ++k) {
                const long c = static_cast<long>(rng.next() * 5) - 2;
                p = p + Polynomial::variable(n, k).scaled(Rational(c, 4));
            }
            coeffs.push_back(p);
        }
        fields.emplace_back(std::move(coeffs));
    }
    std::vector<int> sigma(static_cast<std::size_t>(n), 1);
    return Frame(Frame::Unchecked{}, std::move(fields), DilationWeights(std::move(sigma)));
}

ScalarExpr random_nonneg_potential(int n, UniformStream& rng) {
    // Square of a random linear form plus a nonnegative constant.
    ScalarExpr lin = ScalarExpr::constant(rng.next(-1.0, 1.0));
    for (int j = 0; j < n; ++j)
        lin = lin + rng.next(-1.0, 1.0) * ScalarExpr::variable(j);
    return lin * lin + ScalarExpr::constant(rng.next(0.0, 0.5));
}

double max_abs_err(std::span<const double> got, double expected) {
    double m = 0.0;
    for (double v : got) m = std::max(m, std::abs(v - expected));
    return m;
}

}  // namespace

TEST_CASE("assemble: directional scheme is exact on the model monomials") {
    // Grushin, u = x1^2: L u = 2 at every interior node (the scheme's
    // second differences and interpolations are exact for this u).
    {
        OperatorSpec spec(grushin_frame(), {}, ScalarExpr::constant(0.0));
        const BoxDomain dom = BoxDomain::cube(2, 1.0, 1.0 / 8.0);
        const DiscreteOperator op = assemble(spec, dom);
        GridField u(dom);
        u.fill([](std::span<const double> x) { return x[0] * x[0]; });
        CHECK(max_abs_err(op.apply_l(u), 2.0) <= 1e-9);
    }

    // H^1, u = x^2 + y^2, Q = 0, b = 0: L u = 4.
    {
        OperatorSpec spec(heisenberg_frame(1), {}, ScalarExpr::constant(0.0));
        const BoxDomain dom = BoxDomain::cube(3, 1.0, 1.0 / 8.0);
        const DiscreteOperator op = assemble(spec, dom);
        GridField u(dom);
        u.fill([](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; });
        CHECK(max_abs_err(op.apply_l(u), 4.0) <= 1e-9);
    }

    // Constant u: L u = -Q c exactly at the nodes.
    {
        OperatorSpec spec(heisenberg_frame(1), {},
                          heisenberg_surrogate_potential(1, 3.0, QFamily::grad_weighted));
        const BoxDomain dom = BoxDomain::cube(3, 1.0, 1.0 / 4.0);
        const DiscreteOperator op = assemble(spec, dom);
        GridField u(dom);
        const double c = 0.75;
        u.fill([&](std::span<const double>) { return c; });
        const auto lu = op.apply_l(u);
        std::vector<int> idx(3);
        std::vector<double> x(3);
        for (std::int64_t r = 0; r < op.interior.rows(); ++r) {
            dom.interior_index(r, idx);
            dom.coordinates(idx, x);
            const double q = spec.potential.eval(x);
            CHECK(std::abs(lu[static_cast<std::size_t>(r)] + q * c) <= 1e-12 * (1.0 + q));
        }
    }
}

TEST_CASE("assemble: M-matrix sign structure") {
    // Presets with nonnegative potentials.
    {
        OperatorSpec spec(heisenberg_frame(1), {},
                          heisenberg_surrogate_potential(1, 1.5, QFamily::grad_weighted));
        const DiscreteOperator op = assemble(spec, BoxDomain::cube(3, 2.0, 0.25));
        const auto rep = op.sign_report();
        CHECK(rep.diagonal_positive);
        CHECK(rep.offdiag_nonpositive);
        CHECK(rep.weakly_dominant);
        CHECK(rep.worst_row_sum <= 1e-9);
    }
    {
        OperatorSpec spec(grushin_frame(), {}, grushin_surrogate_potential(2.0));
        const DiscreteOperator op = assemble(spec, BoxDomain::cube(2, 2.0, 0.125));
        CHECK(op.sign_report().ok());
    }

    // Random operators with Q >= 0 and drift keep the structure.
    UniformStream rng(71);
    for (int t = 0; t < 8; ++t) {
        const Frame f = random_test_frame(3, rng);
        std::vector<ScalarExpr> drift = {ScalarExpr::constant(rng.next(-1.0, 1.0)),
                                         ScalarExpr::variable(0) * rng.next(-0.5, 0.5)};
        OperatorSpec spec(f, std::move(drift), random_nonneg_potential(3, rng));
        const DiscreteOperator op = assemble(spec, BoxDomain::cube(3, 1.0, 0.125));
        CHECK(op.sign_report().ok());
    }

    // Negative potential is rejected.
    OperatorSpec bad(grushin_frame(), {}, ScalarExpr::constant(-1.0));
    CHECK_THROWS_AS(assemble(bad, BoxDomain::cube(2, 1.0, 0.25)), std::invalid_argument);
}

TEST_CASE("assemble: grid too coarse for the directional step") {
    // |v| ~ 100 with h = 0.5 overshoots half the box extent.
    OperatorSpec spec(
        Frame(Frame::Unchecked{},
              {PolyVectorField::coordinate(2, 0),
               parse_vector_field({"0", "100*x1"}, 2)},
              DilationWeights({1, 2})),
        {}, ScalarExpr::constant(0.0));
    CHECK_THROWS_AS(assemble(spec, BoxDomain::cube(2, 1.0, 0.5)), std::runtime_error);
}

TEST_CASE("solve_dirichlet: uniqueness and manufactured solutions") {
    OperatorSpec spec(grushin_frame(), {}, ScalarExpr::constant(0.0));
    const BoxDomain dom = BoxDomain::cube(2, 1.0, 1.0 / 16.0);
    const DiscreteOperator op = assemble(spec, dom);

    // Zero data, zero solution.
    {
        GridField boundary(dom), rhs(dom);
        const GridField u = solve_dirichlet(op, boundary, rhs);
        for (double v : u.values) CHECK(std::abs(v) <= 1e-12);
    }

    // boundary = x1^2, rhs = L x1^2 = 2: recovers x1^2 to solver accuracy
    // (the scheme is exact on x1^2).
    {
        GridField boundary(dom), rhs(dom);
        boundary.fill_boundary([](std::span<const double> x) { return x[0] * x[0]; });
        rhs.fill([](std::span<const double>) { return 2.0; });
        SolveOptions opts;
        opts.tol = 1e-10;
        SolveReport rep;
        const GridField u = solve_dirichlet(op, boundary, rhs, opts, &rep);
        CHECK(rep.converged);
        GridField exact(dom);
        exact.fill([](std::span<const double> x) { return x[0] * x[0]; });
        double err = 0.0;
        for (std::size_t i = 0; i < u.values.size(); ++i)
            err = std::max(err, std::abs(u.values[i] - exact.values[i]));
        CHECK(err <= 1e-7);
    }
}

TEST_CASE("solve_dirichlet: bounds 0 <= u <= gamma for constant boundary") {
    OperatorSpec spec(heisenberg_frame(1), {},
                      heisenberg_surrogate_potential(1, 2.0, QFamily::grad_weighted));
    const BoxDomain dom = BoxDomain::cube(3, 2.0, 0.25);
    const DiscreteOperator op = assemble(spec, dom);
    const double gamma = 0.8;
    GridField boundary(dom), rhs(dom);
    std::fill(boundary.values.begin(), boundary.values.end(), gamma);
    SolveOptions opts;
    opts.tol = 1e-11;
    const GridField u = solve_dirichlet(op, boundary, rhs, opts);
    for (double v : u.values) {
        CHECK(v >= -1e-9);
        CHECK(v <= gamma + 1e-9);
    }
}

TEST_CASE("solve_dirichlet: comparison property") {
    UniformStream rng(83);
    OperatorSpec spec(grushin_frame(), {}, grushin_surrogate_potential(1.5));
    const BoxDomain dom = BoxDomain::cube(2, 1.0, 1.0 / 12.0);
    const DiscreteOperator op = assemble(spec, dom);
    SolveOptions opts;
    opts.tol = 1e-11;
    for (int t = 0; t < 5; ++t) {
        GridField g1(dom), g2(dom), r1(dom), r2(dom);
        g1.fill_boundary([&](std::span<const double>) { return rng.next(-1.0, 1.0); });
        g2.values = g1.values;
        for (auto& v : g2.values) v += rng.next();  // boundary1 <= boundary2
        r2.fill([&](std::span<const double>) { return rng.next(-1.0, 1.0); });
        r1.values = r2.values;
        for (auto& v : r1.values) v += rng.next();  // rhs1 >= rhs2
        const GridField u1 = solve_dirichlet(op, g1, r1, opts);
        const GridField u2 = solve_dirichlet(op, g2, r2, opts);
        for (std::size_t i = 0; i < u1.values.size(); ++i)
            CHECK(u1.values[i] <= u2.values[i] + 1e-9);
    }
}

TEST_CASE("manufactured-solution convergence is first order with drift") {
    // L = X1^2 + X2^2 + X1 - Q with Q = 1 on the Grushin box; u = x1^2.
    // The upwinded drift introduces the O(h) truncation; the observed order
    // should be ~1.
    OperatorSpec spec(grushin_frame(),
                      {ScalarExpr::constant(1.0), ScalarExpr::constant(0.0)},
                      ScalarExpr::constant(1.0));
    auto solve_err = [&](int cells) {
        const BoxDomain dom = BoxDomain::cube(2, 1.0, 2.0 / cells);
        const DiscreteOperator op = assemble(spec, dom);
        GridField boundary(dom), rhs(dom);
        boundary.fill_boundary([](std::span<const double> x) { return x[0] * x[0]; });
        rhs.fill([](std::span<const double> x) {
            return 2.0 + 2.0 * x[0] - x[0] * x[0];
        });
        SolveOptions opts;
        opts.tol = 1e-11;
        const GridField u = solve_dirichlet(op, boundary, rhs, opts);
        double err = 0.0;
        std::vector<int> idx(2);
        std::vector<double> x(2);
        for (std::int64_t id = 0; id < dom.node_count(); ++id) {
            dom.node_index(id, idx);
            dom.coordinates(idx, x);
            err = std::max(err, std::abs(u.at(id) - x[0] * x[0]));
        }
        return err;
    };
    const double e1 = solve_err(16);
    const double e2 = solve_err(32);
    const double e3 = solve_err(64);
    const double order1 = std::log2(e1 / e2);
    const double order2 = std::log2(e2 / e3);
    CHECK(order1 >= 0.9);
    CHECK(order2 >= 0.9);
}

TEST_CASE("weak maximum principle") {
    // 1-D Laplacian toy (duplicated generator keeps m >= 2).
    {
        Frame line(Frame::Unchecked{},
                   {PolyVectorField::coordinate(1, 0), PolyVectorField::coordinate(1, 0)},
                   DilationWeights({1}));
        OperatorSpec spec(line, {}, ScalarExpr::constant(0.0));
        const DiscreteOperator op = assemble(spec, BoxDomain::cube(1, 1.0, 1.0 / 32.0));
        const WmpReport rep = wmp_test(op, 5, 1);
        CHECK(rep.sign_ok);
        CHECK(rep.pass);
    }

    // Preset operator with Q >= 0.
    {
        OperatorSpec spec(heisenberg_frame(1), {},
                          heisenberg_surrogate_potential(1, 2.0, QFamily::grad_weighted));
        const DiscreteOperator op = assemble(spec, BoxDomain::cube(3, 1.0, 1.0 / 8.0));
        SolveOptions unused;
        const WmpReport rep = wmp_test(op, 5, 2);
        CHECK(rep.pass);
        CHECK(rep.max_node_value <= 1e-10);
    }

    // Random operators with Q >= 0 on small grids.
    UniformStream rng(97);
    for (int t = 0; t < 4; ++t) {
        const Frame f = random_test_frame(3, rng);
        OperatorSpec spec(f, {}, random_nonneg_potential(3, rng));
        const DiscreteOperator op = assemble(spec, BoxDomain::cube(3, 1.0, 1.0 / 8.0));
        CHECK(wmp_test(op, 3, static_cast<std::uint64_t>(t)).pass);
    }

    // Negative control: flipping one off-diagonal sign must fail.
    {
        OperatorSpec spec(grushin_frame(), {}, ScalarExpr::constant(0.0));
        DiscreteOperator op = assemble(spec, BoxDomain::cube(2, 1.0, 1.0 / 8.0));
        std::size_t worst = 0;
        double mag = 0.0;
        for (std::size_t k = 0; k < op.interior.val.size(); ++k) {
            const auto r = static_cast<std::int64_t>(
                std::upper_bound(op.interior.row_ptr.begin(), op.interior.row_ptr.end(),
                                 static_cast<std::int64_t>(k)) -
                op.interior.row_ptr.begin() - 1);
            if (op.interior.col[k] != r && std::abs(op.interior.val[k]) > mag) {
                mag = std::abs(op.interior.val[k]);
                worst = k;
            }
        }
        op.interior.val[worst] = mag;  // positive off-diagonal
        const WmpReport rep = wmp_test(op, 5, 3);
        CHECK_FALSE(rep.sign_ok);
        CHECK_FALSE(rep.pass);
    }
}

TEST_CASE("discrete integration by parts defect halves with h") {
    const Frame grushin = grushin_frame();
    const BoxDomain dom = BoxDomain::cube(2, 1.0, 1.0 / 8.0);
    const IbpReport rep = discrete_ibp_test(grushin, dom, 4, 11);
    REQUIRE(rep.defects.size() == 4);
    for (const auto& d : rep.defects) {
        CHECK(d[0] > 0.0);
        CHECK(d[1] < d[0]);
        CHECK(d[2] < d[1]);
    }
    CHECK(rep.pass);
}

TEST_CASE("upwind sums of X_i u vanish for compactly supported u") {
    // With v = 1 the defect reduces to |sum_z X_i u| * prod(h), which is
    // O(h) small because div((X_i)_x) = 0.
    const Frame grushin = grushin_frame();
    const BoxDomain dom = BoxDomain::cube(2, 1.0, 1.0 / 16.0);
    GridField u(dom);
    u.fill([](std::span<const double> x) {
        const double s1 = x[0] / 0.4, s2 = x[1] / 0.4;
        const double q1 = 1.0 - s1 * s1, q2 = 1.0 - s2 * s2;
        if (q1 <= 0.0 || q2 <= 0.0) return 0.0;
        return q1 * q1 * q1 * q2 * q2 * q2;
    });
    double cell = dom.h[0] * dom.h[1];
    std::vector<int> idx(2);
    std::vector<double> x(2), v(2);
    for (int i = 0; i < grushin.generators(); ++i) {
        double acc = 0.0, mass = 0.0;
        std::vector<int> nb(2);
        for (std::int64_t id = 0; id < dom.node_count(); ++id) {
            dom.node_index(id, idx);
            dom.coordinates(idx, x);
            grushin.field(i).evaluate(x, v);
            mass += std::abs(u.at(id)) * cell;
            for (int j = 0; j < 2; ++j) {
                if (v[static_cast<std::size_t>(j)] == 0.0) continue;
                nb = idx;
                const int dir = v[static_cast<std::size_t>(j)] > 0.0 ? 1 : -1;
                nb[static_cast<std::size_t>(j)] += dir;
                if (nb[static_cast<std::size_t>(j)] < 0 ||
                    nb[static_cast<std::size_t>(j)] > dom.cells[static_cast<std::size_t>(j)])
                    continue;
                acc += v[static_cast<std::size_t>(j)] * dir *
                       (u.at(dom.node_id(nb)) - u.at(id)) / dom.h[static_cast<std::size_t>(j)] *
                       cell;
            }
        }
        CHECK(std::abs(acc) <= 0.2 * dom.h[0] * std::max(mass, 1.0));
    }
}

TEST_CASE("assembler supports higher-order Heisenberg frames (5-D)") {
    OperatorSpec spec(heisenberg_frame(2), {},
                      heisenberg_surrogate_potential(2, 3.0, QFamily::plain));
    const BoxDomain dom = BoxDomain::cube(5, 1.0, 0.25);
    const DiscreteOperator op = assemble(spec, dom);
    CHECK(op.sign_report().ok());
    GridField u(dom);
    const double c = 0.3;
    u.fill([&](std::span<const double>) { return c; });
    const auto lu = op.apply_l(u);
    std::vector<int> idx(5);
    std::vector<double> z(5);
    for (std::int64_t r = 0; r < op.interior.rows(); ++r) {
        dom.interior_index(r, idx);
        dom.coordinates(idx, z);
        CHECK(std::abs(lu[static_cast<std::size_t>(r)] + spec.potential.eval(z) * c) <= 1e-12);
    }
}
