// SPDX-License-Identifier: Apache-2.0
#include "lioulab/solve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lioulab {

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

struct System {
    const Csr& a;
    std::vector<double> b;     // right-hand side of A u = b
    std::vector<double> diag;  // cached diagonal

    explicit System(const DiscreteOperator& op, const GridField& boundary,
                    const GridField& rhs)
        : a(op.interior) {
        const std::int64_t rows = a.rows();
        b.resize(static_cast<std::size_t>(rows));
        diag.assign(static_cast<std::size_t>(rows), 0.0);
        std::vector<int> idx(static_cast<std::size_t>(op.domain.n));
        // A u = -rhs - B g  (A = -L on interior columns, B the boundary part).
        for (std::int64_t r = 0; r < rows; ++r) {
            op.domain.interior_index(r, idx);
            double acc = -rhs.at(op.domain.node_id(idx));
            for (std::int64_t k = op.boundary.row_ptr[static_cast<std::size_t>(r)];
                 k < op.boundary.row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
                acc -= op.boundary.val[static_cast<std::size_t>(k)] *
                       boundary.at(op.boundary.col[static_cast<std::size_t>(k)]);
            b[static_cast<std::size_t>(r)] = acc;
            for (std::int64_t k = a.row_ptr[static_cast<std::size_t>(r)];
                 k < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
                if (a.col[static_cast<std::size_t>(k)] == r)
                    diag[static_cast<std::size_t>(r)] = a.val[static_cast<std::size_t>(k)];
            }
            if (diag[static_cast<std::size_t>(r)] <= 0.0)
                throw std::runtime_error("solve_dirichlet: nonpositive diagonal entry");
        }
    }

    // One symmetric Gauss-Seidel sweep on A x = target.
    void sgs_sweep(std::span<const double> target, std::span<double> x) const {
        const std::int64_t rows = a.rows();
        for (std::int64_t r = 0; r < rows; ++r) {
            double acc = target[static_cast<std::size_t>(r)];
            for (std::int64_t k = a.row_ptr[static_cast<std::size_t>(r)];
                 k < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
                const auto c = static_cast<std::size_t>(a.col[static_cast<std::size_t>(k)]);
                if (static_cast<std::int64_t>(c) != r)
                    acc -= a.val[static_cast<std::size_t>(k)] * x[c];
            }
            x[static_cast<std::size_t>(r)] = acc / diag[static_cast<std::size_t>(r)];
        }
        for (std::int64_t r = rows - 1; r >= 0; --r) {
            double acc = target[static_cast<std::size_t>(r)];
            for (std::int64_t k = a.row_ptr[static_cast<std::size_t>(r)];
                 k < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
                const auto c = static_cast<std::size_t>(a.col[static_cast<std::size_t>(k)]);
                if (static_cast<std::int64_t>(c) != r)
                    acc -= a.val[static_cast<std::size_t>(k)] * x[c];
            }
            x[static_cast<std::size_t>(r)] = acc / diag[static_cast<std::size_t>(r)];
        }
    }

    double residual_inf(std::span<const double> x, std::span<double> scratch) const {
        a.matvec(x, scratch);
        double m = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i)
            m = std::max(m, std::abs(b[i] - scratch[i]));
        return m;
    }
};

}  // namespace

GridField solve_dirichlet(const DiscreteOperator& op, const GridField& boundary,
                          const GridField& rhs, const SolveOptions& opts, SolveReport* report,
                          const GridField* initial) {
    const std::int64_t rows = op.interior.rows();
    System sys(op, boundary, rhs);

    const double scale = 1.0 + inf_norm(rhs.values) + inf_norm(boundary.values);
    const double target = opts.tol * scale;

    std::vector<double> x(static_cast<std::size_t>(rows), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(op.domain.n));
    if (initial) {
        for (std::int64_t r = 0; r < rows; ++r) {
            op.domain.interior_index(r, idx);
            x[static_cast<std::size_t>(r)] = initial->at(op.domain.node_id(idx));
        }
    }

    SolveReport rep;
    rep.target = target;
    std::vector<double> scratch(static_cast<std::size_t>(rows));

    auto method = opts.method;
    if (method == SolveOptions::Method::automatic)
        method = rows <= 50000 ? SolveOptions::Method::sgs : SolveOptions::Method::bicgstab;

    if (method == SolveOptions::Method::sgs) {
        rep.method = "sgs";
        double res = sys.residual_inf(x, scratch);
        long sweep = 0;
        while (res > target && sweep < opts.max_sweeps) {
            sys.sgs_sweep(sys.b, x);
            ++sweep;
            if (sweep % 8 == 0 || sweep == opts.max_sweeps) res = sys.residual_inf(x, scratch);
        }
        res = sys.residual_inf(x, scratch);
        rep.converged = res <= target;
        rep.iterations = sweep;
        rep.residual = res;
    } else {
        rep.method = "bicgstab+sgs";
        const auto nrows = static_cast<std::size_t>(rows);
        std::vector<double> r(nrows), rhat(nrows), v(nrows, 0.0), pvec(nrows, 0.0);
        std::vector<double> y(nrows, 0.0), z(nrows, 0.0), s(nrows), t(nrows);
        sys.a.matvec(x, r);
        for (std::size_t i = 0; i < nrows; ++i) r[i] = sys.b[i] - r[i];
        rhat = r;
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        long it = 0;
        double res = inf_norm(r);
        while (res > target && it < opts.max_iterations) {
            ++it;
            const double rho1 = dot(rhat, r);
            if (rho1 == 0.0) break;
            if (it == 1) {
                pvec = r;
            } else {
                const double beta = (rho1 / rho) * (alpha / omega);
                for (std::size_t i = 0; i < nrows; ++i)
                    pvec[i] = r[i] + beta * (pvec[i] - omega * v[i]);
            }
            rho = rho1;
            std::fill(y.begin(), y.end(), 0.0);
            sys.sgs_sweep(pvec, y);
            sys.a.matvec(y, v);
            const double rv = dot(rhat, v);
            if (rv == 0.0) break;
            alpha = rho1 / rv;
            for (std::size_t i = 0; i < nrows; ++i) s[i] = r[i] - alpha * v[i];
            if (inf_norm(s) <= target) {
                for (std::size_t i = 0; i < nrows; ++i) x[i] += alpha * y[i];
                res = sys.residual_inf(x, scratch);
                if (res <= target) break;
                for (std::size_t i = 0; i < nrows; ++i) r[i] = sys.b[i] - scratch[i];
                continue;
            }
            std::fill(z.begin(), z.end(), 0.0);
            sys.sgs_sweep(s, z);
            sys.a.matvec(z, t);
            const double tt = dot(t, t);
            if (tt == 0.0) break;
            omega = dot(t, s) / tt;
            for (std::size_t i = 0; i < nrows; ++i) {
                x[i] += alpha * y[i] + omega * z[i];
                r[i] = s[i] - omega * t[i];
            }
            res = inf_norm(r);
            if (omega == 0.0) break;
        }
        res = sys.residual_inf(x, scratch);
        // Recurrence breakdowns leave a usable iterate; polish with sweeps.
        long extra = 0;
        while (res > target && extra < 1000) {
            sys.sgs_sweep(sys.b, x);
            ++extra;
            if (extra % 8 == 0) res = sys.residual_inf(x, scratch);
        }
        res = sys.residual_inf(x, scratch);
        rep.converged = res <= target;
        rep.iterations = it + extra;
        rep.residual = res;
    }

    GridField out(op.domain);
    out.values = boundary.values;
    for (std::int64_t r = 0; r < rows; ++r) {
        op.domain.interior_index(r, idx);
        out.at(op.domain.node_id(idx)) = x[static_cast<std::size_t>(r)];
    }
    if (!out.all_finite()) rep.converged = false;
    if (report) *report = rep;
    return out;
}

}  // namespace lioulab
