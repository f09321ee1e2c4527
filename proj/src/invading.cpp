// SPDX-License-Identifier: Apache-2.0
#include "lioulab/invading.hpp"

#include "lioulab/montecarlo.hpp"
#include "lioulab/norms.hpp"
#include "lioulab/presets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace lioulab {

namespace {

ScalarExpr heisenberg_quartic(int m) {
    // N^4 = (|x|^2 + |y|^2)^2 + 16 t^2, a polynomial.
    const int n = 2 * m + 1;
    ScalarExpr rho2 = ScalarExpr::constant(0.0);
    for (int i = 0; i < 2 * m; ++i) {
        ScalarExpr xi = ScalarExpr::variable(i);
        rho2 = rho2 + xi * xi;
    }
    ScalarExpr t = ScalarExpr::variable(n - 1);
    return rho2 * rho2 + 16.0 * (t * t);
}

ScalarExpr heisenberg_rho2(int m) {
    ScalarExpr rho2 = ScalarExpr::constant(0.0);
    for (int i = 0; i < 2 * m; ++i) {
        ScalarExpr xi = ScalarExpr::variable(i);
        rho2 = rho2 + xi * xi;
    }
    return rho2;
}

}  // namespace

ScalarExpr heisenberg_surrogate_potential(int m, double alpha, QFamily family) {
    const ScalarExpr one_plus_n4 = 1.0 + heisenberg_quartic(m);
    if (family == QFamily::plain) return pow(one_plus_n4, -rational_approx(alpha) / 4);
    return heisenberg_rho2(m) * pow(one_plus_n4, -rational_approx(alpha + 2.0) / 4);
}

ScalarExpr grushin_surrogate_potential(double alpha) {
    ScalarExpr x1 = ScalarExpr::variable(0);
    ScalarExpr x2 = ScalarExpr::variable(1);
    ScalarExpr n4 = pow(x1, Rational(4)) + x2 * x2;
    return pow(1.0 + n4, -rational_approx(alpha) / 4);
}

InvadingRun invading_run(const InvadingConfig& cfg) {
    if (cfg.gamma <= 0.0) throw std::invalid_argument("invading_run needs gamma > 0");
    if (cfg.ladder.empty()) throw std::invalid_argument("invading_run needs a non-empty ladder");
    for (std::size_t i = 0; i + 1 < cfg.ladder.size(); ++i) {
        if (cfg.ladder[i] >= cfg.ladder[i + 1])
            throw std::invalid_argument("ladder must be strictly increasing");
    }

    Frame frame = cfg.preset == "grushin" ? grushin_frame() : heisenberg_frame(cfg.m);
    ScalarExpr q = cfg.preset == "grushin"
                       ? grushin_surrogate_potential(cfg.alpha)
                       : heisenberg_surrogate_potential(cfg.m, cfg.alpha, cfg.q_family);
    OperatorSpec spec(std::move(frame), {}, std::move(q));
    const int n = spec.frame.dim();

    InvadingRun run;
    run.config = cfg;

    GridField prev;
    bool have_prev = false;
    for (int j : cfg.ladder) {
        const BoxDomain dom = BoxDomain::cube(n, static_cast<double>(j), cfg.h);
        const DiscreteOperator op = assemble(spec, dom, cfg.assemble_opts);
        GridField boundary(dom);
        std::fill(boundary.values.begin(), boundary.values.end(), cfg.gamma);
        GridField rhs(dom);

        // Warm start: previous rung on the common nodes, gamma outside.
        GridField guess(dom);
        std::fill(guess.values.begin(), guess.values.end(), cfg.gamma);
        if (have_prev) {
            std::vector<int> idx(static_cast<std::size_t>(n));
            std::vector<int> pidx(static_cast<std::size_t>(n));
            std::vector<double> x(static_cast<std::size_t>(n));
            for (std::int64_t id = 0; id < dom.node_count(); ++id) {
                dom.node_index(id, idx);
                dom.coordinates(idx, x);
                bool inside = true;
                for (int a = 0; a < n && inside; ++a) {
                    const auto as = static_cast<std::size_t>(a);
                    const double s = (x[as] - prev.domain.lo[as]) / prev.domain.h[as];
                    const long i0 = std::lround(s);
                    if (i0 < 0 || i0 > prev.domain.cells[as] ||
                        std::abs(s - static_cast<double>(i0)) > 1e-9)
                        inside = false;
                    else
                        pidx[as] = static_cast<int>(i0);
                }
                if (inside) guess.at(id) = prev.at(prev.domain.node_id(pidx));
            }
        }

        SolveReport srep;
        GridField u = solve_dirichlet(op, boundary, rhs, cfg.solver, &srep, &guess);
        if (!srep.converged) {
            std::ostringstream msg;
            msg << "invading_run: rung j = " << j << " did not converge (residual "
                << srep.residual << ", target " << srep.target << ")";
            throw std::runtime_error(msg.str());
        }

        RungDiagnostics diag;
        diag.j = j;
        diag.unknowns = dom.interior_count();
        diag.solve = srep;
        diag.min_value = *std::min_element(u.values.begin(), u.values.end());
        diag.max_value = *std::max_element(u.values.begin(), u.values.end());
        diag.bound_defect =
            std::max(std::max(-diag.min_value, 0.0), std::max(diag.max_value - cfg.gamma, 0.0));

        {
            std::vector<int> idx(static_cast<std::size_t>(n));
            for (int a = 0; a < n; ++a)
                idx[static_cast<std::size_t>(a)] = dom.cells[static_cast<std::size_t>(a)] / 2;
            diag.center = u.at(dom.node_id(idx));
        }

        if (have_prev) {
            // Same spacing on every rung: previous nodes are a subset.
            double defect = 0.0;
            std::vector<int> idx(static_cast<std::size_t>(n));
            std::vector<int> cidx(static_cast<std::size_t>(n));
            std::vector<double> x(static_cast<std::size_t>(n));
            for (std::int64_t id = 0; id < prev.domain.node_count(); ++id) {
                prev.domain.node_index(id, idx);
                prev.domain.coordinates(idx, x);
                for (int a = 0; a < n; ++a) {
                    const auto as = static_cast<std::size_t>(a);
                    cidx[as] = static_cast<int>(
                        std::lround((x[as] - dom.lo[as]) / dom.h[as]));
                }
                defect = std::max(defect, u.at(dom.node_id(cidx)) - prev.at(id));
            }
            diag.monotonicity_defect = std::max(defect, 0.0);
        }

        if (cfg.preset != "grushin") {
            // Ring statistics on the t = 0 slice at integer radii.
            const int tm = 2 * cfg.m;  // t axis index
            std::vector<int> idx(static_cast<std::size_t>(n));
            std::vector<double> x(static_cast<std::size_t>(n));
            for (int ring = 1; ring < j; ++ring) {
                double sum = 0.0, mn = cfg.gamma + 1.0, mx = -1.0;
                std::int64_t cnt = 0;
                for (std::int64_t id = 0; id < dom.node_count(); ++id) {
                    dom.node_index(id, idx);
                    if (idx[static_cast<std::size_t>(tm)] !=
                        dom.cells[static_cast<std::size_t>(tm)] / 2)
                        continue;
                    dom.coordinates(idx, x);
                    double rho2 = 0.0;
                    for (int a = 0; a < tm; ++a)
                        rho2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
                    const double rho = std::sqrt(rho2);
                    if (std::abs(rho - ring) > cfg.h / 2.0) continue;
                    const double v = u.at(id);
                    sum += v;
                    mn = std::min(mn, v);
                    mx = std::max(mx, v);
                    ++cnt;
                }
                if (cnt == 0) continue;
                diag.ring_radii.push_back(ring);
                diag.ring_mean.push_back(sum / static_cast<double>(cnt));
                diag.ring_min.push_back(mn);
                diag.ring_max.push_back(mx);
            }
        }

        run.rungs.push_back(std::move(diag));
        prev = u;
        have_prev = true;
        if (cfg.keep_solutions) run.solutions.push_back(std::move(u));
    }

    // Limit estimate for the center sequence: Aitken delta-squared on the
    // last three rungs when usable, otherwise the last value.
    const std::size_t k = run.rungs.size();
    run.limit_estimate = run.rungs.back().center;
    if (k >= 3) {
        const double c0 = run.rungs[k - 3].center;
        const double c1 = run.rungs[k - 2].center;
        const double c2 = run.rungs[k - 1].center;
        const double den = c2 - 2.0 * c1 + c0;
        if (std::abs(den) > 1e-12) {
            const double extrap = c2 - (c2 - c1) * (c2 - c1) / den;
            if (extrap >= 0.0 && extrap <= c2 + 1e-12) run.limit_estimate = extrap;
        }
    }
    return run;
}

bool barrier_window_valid(const BarrierSpec& b, int m, double alpha, std::string* detail) {
    std::ostringstream why;
    double upper;
    if (b.variant == BarrierSpec::Variant::cylindrical) {
        upper = std::min(2.0 * m - 2.0, alpha - 2.0);
        if (upper <= 0.0) why << "cylindrical window empty: min(2m-2, alpha-2) <= 0";
    } else {
        upper = std::min(alpha - 2.0, 2.0);
        if (upper <= 0.0) why << "radial window empty: min(alpha-2, 2) <= 0";
    }
    bool ok = upper > 0.0 && b.beta > 0.0 && b.beta < upper;
    if (ok && b.r0 <= 0.0) {
        ok = false;
        why << "cutoff radius must be positive";
    }
    if (!ok && why.str().empty())
        why << "beta = " << b.beta << " outside (0, " << upper << ")";
    if (detail) *detail = why.str();
    return ok;
}

namespace {

double cylinder_rho(std::span<const double> z, int m) {
    double rho2 = 0.0;
    for (int a = 0; a < 2 * m; ++a) rho2 += z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(a)];
    return std::sqrt(rho2);
}

double kaplan_value(std::span<const double> z, int m) {
    const double rho = cylinder_rho(z, m);
    const double t = z[static_cast<std::size_t>(2 * m)];
    return std::pow(rho * rho * rho * rho + 16.0 * t * t, 0.25);
}

double barrier_coordinate(const BarrierSpec& b, int m, std::span<const double> z) {
    return b.variant == BarrierSpec::Variant::cylindrical ? cylinder_rho(z, m)
                                                          : kaplan_value(z, m);
}

}  // namespace

BarrierReport barrier_check(const BarrierSpec& b, int m, double alpha, const ScalarExpr& q,
                            std::span<const std::vector<double>> points) {
    std::string why;
    if (!barrier_window_valid(b, m, alpha, &why))
        throw std::invalid_argument("barrier_check: " + why);
    for (const auto& z : points) {
        if (barrier_coordinate(b, m, z) <= b.r0)
            throw std::invalid_argument("barrier_check: sample inside the cutoff");
    }

    BarrierReport rep;
    rep.sample_count = static_cast<int>(points.size());
    rep.max_violation = -std::numeric_limits<double>::infinity();
    rep.a_min = 0.0;

    // Delta V with unit amplitude; the check is linear in A.
    std::function<double(std::span<const double>)> lap_v1;
    if (b.variant == BarrierSpec::Variant::cylindrical) {
        const double c = b.beta * (b.beta + 2.0 - 2.0 * m);
        lap_v1 = [c, b, m](std::span<const double> z) {
            const double rho = cylinder_rho(z, m);
            return c * std::pow(rho, -b.beta - 2.0);
        };
    } else {
        // Symbolic horizontal second derivatives of N^-beta.
        const Frame frame = heisenberg_frame(m);
        ScalarExpr v1 = pow(kaplan_norm_expr(m), -rational_approx(b.beta));
        ScalarExpr lap = ScalarExpr::constant(0.0);
        for (int i = 0; i < frame.generators(); ++i)
            lap = lap + horizontal_derivative_expr(frame, i, horizontal_derivative_expr(frame, i, v1));
        lap_v1 = [lap](std::span<const double> z) { return lap.eval(z); };
    }

    bool possible = true;
    for (const auto& z : points) {
        const double lv1 = lap_v1(z);
        const double qz = q.eval(z);
        const double violation = b.amplitude * lv1 + qz;
        rep.max_violation = std::max(rep.max_violation, violation);
        if (lv1 < 0.0) {
            rep.a_min = std::max(rep.a_min, qz / (-lv1));
        } else if (qz > 0.0) {
            possible = false;
        }
    }
    if (!possible) rep.a_min = std::numeric_limits<double>::infinity();
    rep.ok = rep.max_violation <= 1e-12;
    return rep;
}

std::vector<std::vector<double>> sample_outside_cutoff(const BarrierSpec& b, int m, int count,
                                                       std::uint64_t seed, double reach) {
    const int n = 2 * m + 1;
    HaltonSequence seq(n, seed);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<double> u(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n));
    const double rmax = reach * b.r0;
    long tries = 0;
    const long cap = 100000L * count;
    while (static_cast<int>(out.size()) < count) {
        if (++tries > cap) throw std::runtime_error("barrier sampler rejection cap exceeded");
        seq.next(u);
        for (int a = 0; a < 2 * m; ++a)
            z[static_cast<std::size_t>(a)] = (2.0 * u[static_cast<std::size_t>(a)] - 1.0) * rmax;
        z[static_cast<std::size_t>(n - 1)] =
            (2.0 * u[static_cast<std::size_t>(n - 1)] - 1.0) * rmax * rmax / 4.0;
        const double c = barrier_coordinate(b, m, z);
        if (c <= b.r0 || c > rmax) continue;
        out.push_back(z);
    }
    return out;
}

Step2Report step2_certificate(const InvadingRun& run, const BarrierSpec& b, double delta,
                              double tol) {
    Step2Report rep;
    const double gamma = run.config.gamma;
    rep.tol = tol > 0.0 ? tol : 0.02 * gamma;

    if (run.config.preset == "grushin") {
        rep.applicable = false;
        rep.detail = "barrier inapplicable: grushin runs have no barrier variant";
        return rep;
    }
    std::string why;
    if (!barrier_window_valid(b, run.config.m, run.config.alpha, &why)) {
        rep.applicable = false;
        rep.detail = "barrier inapplicable: " + why;
        return rep;
    }
    rep.applicable = true;

    const double v_r0 = b.amplitude * std::pow(b.r0, -b.beta);
    if (delta < gamma || delta < gamma / v_r0) {
        rep.skipped = true;
        std::ostringstream d;
        d << "precondition failed: need delta >= gamma and delta >= gamma/V(R0) = "
          << gamma / v_r0;
        rep.detail = d.str();
        return rep;
    }
    if (run.solutions.empty()) {
        rep.skipped = true;
        rep.detail = "run kept no solutions";
        return rep;
    }

    const int m = run.config.m;
    rep.min_w = std::numeric_limits<double>::infinity();
    for (const auto& u : run.solutions) {
        const BoxDomain& dom = u.domain;
        std::vector<int> idx(static_cast<std::size_t>(dom.n));
        std::vector<double> z(static_cast<std::size_t>(dom.n));
        for (std::int64_t id = 0; id < dom.node_count(); ++id) {
            dom.node_index(id, idx);
            dom.coordinates(idx, z);
            const double c = barrier_coordinate(b, m, z);
            if (c <= b.r0) continue;
            const double v = b.amplitude * std::pow(c, -b.beta);
            const double w = u.at(id) - gamma + delta * v;
            rep.min_w = std::min(rep.min_w, w);
            ++rep.nodes_checked;
        }
    }
    rep.pass = rep.min_w >= -rep.tol;
    return rep;
}

}  // namespace lioulab
