// SPDX-License-Identifier: Apache-2.0
#include "lioulab/pde_checks.hpp"

#include "lioulab/montecarlo.hpp"

#include <algorithm>
#include <cmath>

namespace lioulab {

WmpReport wmp_test(const DiscreteOperator& op, int trials, std::uint64_t seed) {
    WmpReport rep;
    rep.trials = trials;
    rep.sign_ok = op.sign_report().ok();

    SolveOptions opts;
    opts.tol = 1e-12;
    opts.method = SolveOptions::Method::bicgstab;
    for (int t = 0; t < trials; ++t) {
        UniformStream rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        GridField boundary(op.domain);
        GridField rhs(op.domain);
        for (auto& v : boundary.values) v = -rng.next();     // boundary <= 0
        for (auto& v : rhs.values) v = rng.next();           // (Lu)_h >= 0
        const GridField u = solve_dirichlet(op, boundary, rhs, opts);
        for (double v : u.values) rep.max_node_value = std::max(rep.max_node_value, v);
    }
    rep.pass = rep.sign_ok && rep.max_node_value <= 1e-10;
    return rep;
}

namespace {

// C^2 bump prod_j (1 - s_j^2)^3 on |s_j| < 1, supported strictly inside.
struct Bump {
    std::vector<double> center, width;
    double operator()(std::span<const double> x) const {
        double acc = 1.0;
        for (std::size_t j = 0; j < center.size(); ++j) {
            const double s = (x[j] - center[j]) / width[j];
            const double q = 1.0 - s * s;
            if (q <= 0.0) return 0.0;
            acc *= q * q * q;
        }
        return acc;
    }
};

Bump random_bump(const BoxDomain& dom, UniformStream& rng) {
    Bump b;
    b.center.resize(static_cast<std::size_t>(dom.n));
    b.width.resize(static_cast<std::size_t>(dom.n));
    for (int j = 0; j < dom.n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double ext = dom.hi[js] - dom.lo[js];
        b.width[js] = ext * rng.next(0.12, 0.2);
        const double margin = b.width[js] + 0.1 * ext;
        b.center[js] = rng.next(dom.lo[js] + margin, dom.hi[js] - margin);
    }
    return b;
}

// Second bump shifted by at most half a width, so the supports overlap and
// the summation-by-parts defect carries signal.
Bump overlapping_bump(const BoxDomain& dom, const Bump& first, UniformStream& rng) {
    Bump b;
    b.center.resize(first.center.size());
    b.width.resize(first.width.size());
    for (int j = 0; j < dom.n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double ext = dom.hi[js] - dom.lo[js];
        b.width[js] = first.width[js] * rng.next(0.8, 1.2);
        double c = first.center[js] + first.width[js] * rng.next(-0.5, 0.5);
        const double margin = b.width[js] + 0.05 * ext;
        c = std::max(dom.lo[js] + margin, std::min(dom.hi[js] - margin, c));
        b.center[js] = c;
    }
    return b;
}

// The scheme's first-order stencil: X_i u ~ sum_j v_j D_j^{sign v_j} u.
double upwind_xi(const Frame& f, int i, const GridField& u, std::span<const int> idx,
                 std::span<const double> x) {
    const BoxDomain& dom = u.domain;
    std::vector<double> v(static_cast<std::size_t>(dom.n));
    f.field(i).evaluate(x, v);
    std::vector<int> nb(idx.begin(), idx.end());
    const std::int64_t center = dom.node_id(idx);
    double acc = 0.0;
    for (int j = 0; j < dom.n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (v[js] == 0.0) continue;
        const int dir = v[js] > 0.0 ? 1 : -1;
        nb[js] = idx[js] + dir;
        if (nb[js] < 0 || nb[js] > dom.cells[js]) {
            nb[js] = idx[js];  // at the wall; the bumps vanish here anyway
        }
        const double du = dir * (u.at(dom.node_id(nb)) - u.at(center)) / dom.h[js];
        acc += v[js] * du;
        nb[js] = idx[js];
    }
    return acc;
}

double ibp_defect(const Frame& f, const BoxDomain& dom, const Bump& phi, const Bump& psi) {
    GridField u(dom), w(dom);
    u.fill([&](std::span<const double> x) { return phi(x); });
    w.fill([&](std::span<const double> x) { return psi(x); });
    double cell = 1.0;
    for (double hj : dom.h) cell *= hj;

    double worst = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(dom.n));
    std::vector<double> x(static_cast<std::size_t>(dom.n));
    for (int i = 0; i < f.generators(); ++i) {
        double acc = 0.0;
        for (std::int64_t id = 0; id < dom.node_count(); ++id) {
            dom.node_index(id, idx);
            dom.coordinates(idx, x);
            const double ui = u.at(id), wi = w.at(id);
            if (ui == 0.0 && wi == 0.0) continue;
            acc += (wi * upwind_xi(f, i, u, idx, x) + ui * upwind_xi(f, i, w, idx, x)) * cell;
        }
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

}  // namespace

IbpReport discrete_ibp_test(const Frame& f, const BoxDomain& dom, int trials,
                            std::uint64_t seed) {
    IbpReport rep;
    const BoxDomain fine = dom.refined();
    const BoxDomain finer = fine.refined();
    bool all_ok = true;
    for (int t = 0; t < trials; ++t) {
        UniformStream rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        const Bump phi = random_bump(dom, rng);
        const Bump psi = overlapping_bump(dom, phi, rng);
        std::array<double, 3> d{ibp_defect(f, dom, phi, psi), ibp_defect(f, fine, phi, psi),
                                ibp_defect(f, finer, phi, psi)};
        std::array<double, 2> r{d[1] / d[0], d[2] / d[1]};
        all_ok = all_ok && r[0] <= rep.threshold && r[1] <= rep.threshold;
        rep.defects.push_back(d);
        rep.ratios.push_back(r);
    }
    rep.pass = all_ok;
    return rep;
}

}  // namespace lioulab
