// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lioulab/montecarlo.hpp"
#include "lioulab/presets.hpp"

#include <cmath>
#include <map>

using namespace lioulab;

namespace {

std::vector<std::vector<double>> random_points(int n, int count, double range,
                                               std::uint64_t seed) {
    UniformStream rng(seed);
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < count; ++k) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto& c : x) c = rng.next(-range, range);
        pts.push_back(std::move(x));
    }
    return pts;
}

// Exact rank oracle over the rationals: the evaluated columns at a rational
// point, eliminated with exact arithmetic.
int exact_rank(const std::vector<PolyVectorField>& fields,
               const std::vector<Rational>& point) {
    const int n = fields.front().dim();
    const int k = static_cast<int>(fields.size());
    std::vector<std::vector<Rational>> m(static_cast<std::size_t>(n),
                                         std::vector<Rational>(static_cast<std::size_t>(k)));
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < n; ++i) {
            // Evaluate coefficient i of field j exactly by substitution.
            Rational acc = 0;
            for (const auto& [e, c] : fields[static_cast<std::size_t>(j)].coeff(i).terms()) {
                Rational term = c;
                for (std::size_t a = 0; a < e.size(); ++a)
                    term *= rational_pow(point[a], e[a]);
                acc += term;
            }
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
        }
    }
    int rank = 0;
    int row = 0;
    for (int col = 0; col < k && row < n; ++col) {
        int piv = -1;
        for (int i = row; i < n; ++i) {
            if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        std::swap(m[static_cast<std::size_t>(row)], m[static_cast<std::size_t>(piv)]);
        for (int i = row + 1; i < n; ++i) {
            const Rational f = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] /
                               m[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
            for (int c = col; c < k; ++c)
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] -=
                    f * m[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)];
        }
        ++row;
        ++rank;
    }
    return rank;
}

}  // namespace

TEST_CASE("generate_brackets on the presets") {
    const Frame grushin = grushin_frame();
    const LieBasisResult g2 = generate_brackets(grushin, 2);
    REQUIRE(g2.elements.size() == 3);
    CHECK(g2.elements[0].field == grushin.field(0));
    CHECK(g2.elements[1].field == grushin.field(1));
    CHECK(g2.elements[2].field == PolyVectorField::coordinate(2, 1));
    CHECK(g2.elements[2].word == std::vector<int>{0, 1});

    // max_step 1: just the generators.
    CHECK(generate_brackets(grushin, 1).elements.size() == 2);

    // H^1: generators plus a single bracket (up to sign), equal to -d_t.
    const Frame h1 = heisenberg_frame(1);
    const LieBasisResult h2 = generate_brackets(h1, 2);
    REQUIRE(h2.elements.size() == 3);
    CHECK(h2.elements[2].field == -PolyVectorField::coordinate(3, 2));

    // Exhaustive oracle: every bracket of word length 2 is a multiple of the
    // stored one or zero.
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const PolyVectorField br = lie_bracket(h1.field(i), h1.field(j));
            CHECK((br.is_zero() || br == h2.elements[2].field ||
                   br == -h2.elements[2].field));
        }
    }
}

TEST_CASE("rank_at against the exact rational oracle") {
    const Frame grushin = grushin_frame();
    const auto basis = generate_brackets(grushin, 2);
    std::vector<PolyVectorField> fields;
    for (const auto& e : basis.elements) fields.push_back(e.field);

    const std::vector<double> origin = {0.0, 0.0};
    CHECK(rank_at(fields, origin) == 2);

    // A single nonzero constant field has rank 1.
    std::vector<PolyVectorField> single = {PolyVectorField::coordinate(3, 1)};
    const std::vector<double> o3 = {0.0, 0.0, 0.0};
    CHECK(rank_at(single, o3) == 1);

    // H^1 generators + brackets at a fixed point.
    const Frame h1 = heisenberg_frame(1);
    const auto h1b = generate_brackets(h1, 2);
    std::vector<PolyVectorField> h1fields;
    for (const auto& e : h1b.elements) h1fields.push_back(e.field);
    const std::vector<double> p = {0.3, -1.2, 7.0};
    CHECK(rank_at(h1fields, p) == 3);

    // Random rational points: double rank equals the exact rational rank.
    UniformStream rng(5);
    for (int t = 0; t < 25; ++t) {
        std::vector<Rational> q;
        std::vector<double> qd;
        for (int a = 0; a < 3; ++a) {
            const long num = static_cast<long>(rng.next() * 41) - 20;
            q.emplace_back(num, 4);
            qd.push_back(static_cast<double>(num) / 4.0);
        }
        CHECK(rank_at(h1fields, qd) == exact_rank(h1fields, q));
    }
}

TEST_CASE("check_hoermander") {
    const Frame grushin = grushin_frame();
    auto pts = random_points(2, 50, 10.0, 17);
    const HoermanderReport g = check_hoermander(grushin, pts, 3);
    CHECK(g.satisfied);
    CHECK(g.step == 2);

    // {d1, d2} spans immediately.
    Frame flat(Frame::Unchecked{},
               {PolyVectorField::coordinate(2, 0), PolyVectorField::coordinate(2, 1)},
               DilationWeights({1, 1}));
    const HoermanderReport f = check_hoermander(flat, pts, 3);
    CHECK(f.satisfied);
    CHECK(f.step == 1);

    // {d1, x1 d2} in R^3 never reaches the third direction.
    Frame deficient(Frame::Unchecked{},
                    {PolyVectorField::coordinate(3, 0),
                     parse_vector_field({"0", "x1", "0"}, 3)},
                    DilationWeights({1, 2, 2}));
    auto pts3 = random_points(3, 20, 5.0, 19);
    const HoermanderReport d = check_hoermander(deficient, pts3, 4);
    CHECK_FALSE(d.satisfied);

    // H^1 with default max_step = n.
    const Frame h1 = heisenberg_frame(1);
    auto hpts = random_points(3, 50, 10.0, 23);
    const HoermanderReport h = check_hoermander(h1, hpts);
    CHECK(h.satisfied);
    CHECK(h.step == 2);
}

TEST_CASE("principal matrix") {
    const Frame grushin = grushin_frame();
    UniformStream rng(29);
    for (int t = 0; t < 100; ++t) {
        const std::vector<double> x = {rng.next(-10.0, 10.0), rng.next(-10.0, 10.0)};
        const auto pm = principal_matrix(grushin, x);
        // A(x) = diag(1, x1^2), exactly in double arithmetic.
        CHECK(pm.A.at(0, 0) == 1.0);
        CHECK(pm.A.at(0, 1) == 0.0);
        CHECK(pm.A.at(1, 0) == 0.0);
        CHECK(pm.A.at(1, 1) == x[0] * x[0]);
    }

    const Frame h1 = heisenberg_frame(1);
    for (int t = 0; t < 100; ++t) {
        const std::vector<double> z = {rng.next(-10.0, 10.0), rng.next(-10.0, 10.0),
                                       rng.next(-10.0, 10.0)};
        const auto pm = principal_matrix(h1, z);
        const double x = z[0], y = z[1];
        const double expected[3][3] = {{1.0, 0.0, y / 2.0},
                                       {0.0, 1.0, -x / 2.0},
                                       {y / 2.0, -x / 2.0, (x * x + y * y) / 4.0}};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(pm.A.at(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-12));
        // Symmetric PSD: 2x2 and 3x3 leading minors are nonnegative.
        CHECK(pm.A.at(0, 1) == pm.A.at(1, 0));
        for (int i = 0; i < 3; ++i) CHECK(pm.A.at(i, i) >= -1e-10);
    }
}

namespace {

// Shifted Cholesky: succeeds iff all eigenvalues of A are >= -shift.
bool psd_up_to(const Matrix& a, double shift) {
    const int n = a.rows;
    std::vector<std::vector<double>> l(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = a.at(i, j) + (i == j ? shift : 0.0);
            for (int k = 0; k < j; ++k)
                sum -= l[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                       l[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            if (i == j) {
                if (sum <= 0.0) return false;
                l[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::sqrt(sum);
            } else {
                l[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    sum / l[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("principal matrix is PSD at sampled points") {
    const Frame h2 = heisenberg_frame(2);
    const Frame gr = grushin_frame();
    UniformStream rng(37);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> z(5);
        for (auto& c : z) c = rng.next(-5.0, 5.0);
        const auto pm = principal_matrix(h2, z);
        // Eigenvalue estimates >= -1e-10: a Cholesky factorization of
        // A + 1e-10 I certifies the bound; Rayleigh quotients cross-check.
        CHECK(psd_up_to(pm.A, 1e-10));
        std::vector<double> dir(5);
        for (auto& c : dir) c = rng.next(-1.0, 1.0);
        double quad = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) quad += dir[static_cast<std::size_t>(i)] *
                                                pm.A.at(i, j) * dir[static_cast<std::size_t>(j)];
        CHECK(quad >= -1e-10);

        const std::vector<double> x2 = {z[0], z[1]};
        CHECK(psd_up_to(principal_matrix(gr, x2).A, 1e-10));
    }
}

TEST_CASE("non-total degeneracy") {
    const Frame grushin = grushin_frame();
    const Frame h1 = heisenberg_frame(1);
    auto pts2 = random_points(2, 30, 8.0, 41);
    auto pts3 = random_points(3, 30, 8.0, 43);
    CHECK(check_ntd(grushin, pts2));
    CHECK(check_ntd(h1, pts3));

    // {x1 d1, x1 d2} vanishes on the line x1 = 0.
    Frame degenerate(Frame::Unchecked{},
                     {parse_vector_field({"x1", "0"}, 2), parse_vector_field({"0", "x1"}, 2)},
                     DilationWeights({1, 1}));
    std::vector<std::vector<double>> on_line = {{0.0, 3.0}};
    CHECK_FALSE(check_ntd(degenerate, on_line));
}

TEST_CASE("group law validation and jacobian basis") {
    const GroupLaw h1 = heisenberg_group_law(1);
    const auto basis = jacobian_basis(h1);
    const Frame frame = heisenberg_frame(1);
    REQUIRE(basis.size() == 3);
    CHECK(basis[0] == frame.field(0));
    CHECK(basis[1] == frame.field(1));
    CHECK(basis[2] == PolyVectorField::coordinate(3, 2));

    // Abelian law gives the coordinate fields.
    const auto flat = jacobian_basis(abelian_group_law(4));
    for (int i = 0; i < 4; ++i) CHECK(flat[static_cast<std::size_t>(i)] ==
                                      PolyVectorField::coordinate(4, i));

    // H^2: the four horizontal fields plus d_t.
    const GroupLaw h2 = heisenberg_group_law(2);
    const auto basis2 = jacobian_basis(h2);
    const Frame frame2 = heisenberg_frame(2);
    REQUIRE(basis2.size() == 5);
    for (int i = 0; i < 4; ++i) CHECK(basis2[static_cast<std::size_t>(i)] == frame2.field(i));
    CHECK(basis2[4] == PolyVectorField::coordinate(5, 4));

    // Neutral element violations are rejected.
    std::vector<Polynomial> bad;
    bad.push_back(parse_polynomial("x1 + x3 + 1", 4));
    bad.push_back(parse_polynomial("x2 + x4", 4));
    CHECK_THROWS_AS(GroupLaw(2, std::move(bad)), std::invalid_argument);
}

TEST_CASE("jacobian basis fields are left invariant (chain rule check)") {
    for (int m : {1, 2}) {
        const GroupLaw law = heisenberg_group_law(m);
        const auto basis = jacobian_basis(law);
        const int n = 2 * m + 1;
        UniformStream rng(47 + static_cast<std::uint64_t>(m));
        for (int t = 0; t < 20; ++t) {
            std::vector<double> alpha(static_cast<std::size_t>(n)), x(static_cast<std::size_t>(n));
            for (auto& c : alpha) c = rng.next(-3.0, 3.0);
            for (auto& c : x) c = rng.next(-3.0, 3.0);
            const auto ax = law.compose(alpha, x);
            const Matrix jac = law.translation_jacobian(alpha, x);
            for (const auto& field : basis) {
                const auto at_x = field.evaluate(x);
                const auto at_ax = field.evaluate(ax);
                for (int i = 0; i < n; ++i) {
                    double chain = 0.0;
                    for (int j = 0; j < n; ++j) chain += jac.at(i, j) * at_x[static_cast<std::size_t>(j)];
                    CHECK(at_ax[static_cast<std::size_t>(i)] ==
                          doctest::Approx(chain).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("degree-1 jacobian fields lie-generate the presets") {
    // Condition Lie(V1(G)) = Lie(G): the degree-1 fields of the Jacobian
    // basis reach full rank by brackets.
    for (int m : {1, 2}) {
        const GroupLaw law = heisenberg_group_law(m);
        const auto basis = jacobian_basis(law);
        const int n = 2 * m + 1;
        std::vector<int> sigma(static_cast<std::size_t>(n), 1);
        sigma.back() = 2;
        const DilationWeights w(std::move(sigma));
        std::vector<PolyVectorField> horizontal;
        for (const auto& f : basis) {
            const auto d = homogeneity_degree(f, w);
            if (d.kind == HomogeneityDegree::Kind::value && d.degree == 1)
                horizontal.push_back(f);
        }
        CHECK(static_cast<int>(horizontal.size()) == 2 * m);
        Frame hframe(std::move(horizontal), w);
        auto pts = random_points(n, 20, 5.0, 53);
        CHECK(check_hoermander(hframe, pts, 2).satisfied);
    }
}
