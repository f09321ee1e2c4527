// SPDX-License-Identifier: Apache-2.0
#include "lioulab/assemble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lioulab {

void Csr::matvec(std::span<const double> x, std::span<double> y) const {
    const std::int64_t nr = rows();
    for (std::int64_t r = 0; r < nr; ++r) {
        double acc = 0.0;
        for (std::int64_t k = row_ptr[static_cast<std::size_t>(r)];
             k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
            acc += val[static_cast<std::size_t>(k)] *
                   x[static_cast<std::size_t>(col[static_cast<std::size_t>(k)])];
        y[static_cast<std::size_t>(r)] = acc;
    }
}

DiscreteOperator::SignReport DiscreteOperator::sign_report() const {
    SignReport rep;
    rep.diagonal_positive = true;
    rep.offdiag_nonpositive = true;
    rep.weakly_dominant = true;
    rep.worst_row_sum = 0.0;
    const std::int64_t nr = interior.rows();
    for (std::int64_t r = 0; r < nr; ++r) {
        double diag = 0.0, row_sum = 0.0;
        for (std::int64_t k = interior.row_ptr[static_cast<std::size_t>(r)];
             k < interior.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            const double v = interior.val[static_cast<std::size_t>(k)];
            row_sum += v;
            if (interior.col[static_cast<std::size_t>(k)] == r) {
                diag = v;
            } else if (v > 1e-14) {
                rep.offdiag_nonpositive = false;
            }
        }
        for (std::int64_t k = boundary.row_ptr[static_cast<std::size_t>(r)];
             k < boundary.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            const double v = boundary.val[static_cast<std::size_t>(k)];
            row_sum += v;
            if (v > 1e-14) rep.offdiag_nonpositive = false;
        }
        if (diag <= 0.0) rep.diagonal_positive = false;
        // Row sum equals Q at the node up to rounding; weak dominance.
        const double defect = row_sum - q_diag[static_cast<std::size_t>(r)];
        rep.worst_row_sum = std::max(rep.worst_row_sum, std::abs(defect));
        if (row_sum < -1e-9 * (1.0 + std::abs(diag))) rep.weakly_dominant = false;
    }
    return rep;
}

std::vector<double> DiscreteOperator::apply_l(const GridField& u) const {
    const std::int64_t nr = interior.rows();
    std::vector<double> out(static_cast<std::size_t>(nr), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(domain.n));
    // Gather interior values in row order, then Lu = -(A u_int + B u_bdry).
    std::vector<double> uin(static_cast<std::size_t>(nr));
    for (std::int64_t r = 0; r < nr; ++r) {
        domain.interior_index(r, idx);
        uin[static_cast<std::size_t>(r)] = u.at(domain.node_id(idx));
    }
    interior.matvec(uin, out);
    for (std::int64_t r = 0; r < nr; ++r) {
        double acc = out[static_cast<std::size_t>(r)];
        for (std::int64_t k = boundary.row_ptr[static_cast<std::size_t>(r)];
             k < boundary.row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
            acc += boundary.val[static_cast<std::size_t>(k)] *
                   u.at(boundary.col[static_cast<std::size_t>(k)]);
        out[static_cast<std::size_t>(r)] = -acc;
    }
    return out;
}

DiscreteOperator assemble(const OperatorSpec& spec, const BoxDomain& dom,
                          const AssembleOptions& opts) {
    const int n = dom.n;
    if (spec.frame.dim() != n) throw std::invalid_argument("frame/domain dimension mismatch");
    if (dom.node_count() > std::numeric_limits<std::int32_t>::max())
        throw std::invalid_argument("grid too large for 32-bit column indices");
    const int m = spec.frame.generators();

    double step = dom.h[0];
    for (double hj : dom.h) step = std::min(step, hj);

    // X_i applied to its own coefficients, precomputed once per field.
    std::vector<std::vector<Polynomial>> corrections(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        corrections[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            corrections[static_cast<std::size_t>(i)].push_back(
                spec.frame.field(i).apply(spec.frame.field(i).coeff(j)));
    }

    DiscreteOperator op;
    op.domain = dom;
    {
        std::ostringstream d;
        d << "directional monotone scheme, " << m << " fields, step " << step;
        op.description = d.str();
    }
    const std::int64_t rows = dom.interior_count();
    op.q_diag.resize(static_cast<std::size_t>(rows));
    op.interior.row_ptr.reserve(static_cast<std::size_t>(rows) + 1);
    op.boundary.row_ptr.reserve(static_cast<std::size_t>(rows) + 1);
    op.interior.col.reserve(static_cast<std::size_t>(rows) * 8);
    op.interior.val.reserve(static_cast<std::size_t>(rows) * 8);

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::vector<int> nb(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> v(static_cast<std::size_t>(n));
    std::vector<double> p(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(n));
    std::array<std::int64_t, 256> interp_ids{};
    std::array<double, 256> interp_w{};
    // Scratch row as (global node id, M-coefficient) pairs.
    std::vector<std::pair<std::int64_t, double>> row;

    for (std::int64_t r = 0; r < rows; ++r) {
        dom.interior_index(r, idx);
        dom.coordinates(idx, x);
        const std::int64_t center = dom.node_id(idx);
        row.clear();
        double diag = 0.0;

        std::fill(w.begin(), w.end(), 0.0);

        for (int i = 0; i < m; ++i) {
            spec.frame.field(i).evaluate(x, v);
            double vmax = 0.0;
            for (int j = 0; j < n; ++j) {
                const auto js = static_cast<std::size_t>(j);
                vmax = std::max(vmax, std::abs(v[js]));
                if (std::abs(step * v[js]) > 0.5 * (dom.hi[js] - dom.lo[js])) {
                    throw std::runtime_error(
                        "assemble: grid too coarse for the directional step of field " +
                        std::to_string(i + 1));
                }
            }
            if (vmax > 1e-14) {
                double s_eff = step;
                if (opts.shrink_boundary_steps) {
                    for (int j = 0; j < n; ++j) {
                        const auto js = static_cast<std::size_t>(j);
                        if (v[js] == 0.0) continue;
                        const double room = v[js] > 0.0 ? (dom.hi[js] - x[js]) / (step * v[js])
                                                        : (dom.lo[js] - x[js]) / (step * v[js]);
                        s_eff = std::min(s_eff, step * room);
                    }
                }
                // Second difference along +-s*v with clamped interpolation.
                const double inv_s2 = 1.0 / (s_eff * s_eff);
                diag += 2.0 * inv_s2;
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    for (int j = 0; j < n; ++j) {
                        const auto js = static_cast<std::size_t>(j);
                        p[js] = x[js] + sgn * s_eff * v[js];
                    }
                    const int cnt = clamped_interpolation(dom, p, interp_ids, interp_w);
                    for (int k = 0; k < cnt; ++k) {
                        const auto ks = static_cast<std::size_t>(k);
                        if (interp_w[ks] == 0.0) continue;
                        if (interp_ids[ks] == center) {
                            diag -= interp_w[ks] * inv_s2;
                        } else {
                            row.emplace_back(interp_ids[ks], -interp_w[ks] * inv_s2);
                        }
                    }
                }
            }

            // First-order pieces: coefficient correction and drift.
            double bi = 0.0;
            if (!spec.drift.empty()) bi = spec.drift[static_cast<std::size_t>(i)].eval(x);
            for (int j = 0; j < n; ++j) {
                const auto js = static_cast<std::size_t>(j);
                double cij = 0.0;
                if (!corrections[static_cast<std::size_t>(i)][js].is_zero())
                    cij = corrections[static_cast<std::size_t>(i)][js].evaluate(x);
                w[js] += cij + bi * v[js];
            }
        }

        // Componentwise upwinding of the advection vector w.
        for (int j = 0; j < n; ++j) {
            const auto js = static_cast<std::size_t>(j);
            const double wj = w[js];
            if (std::abs(wj) < 1e-14) continue;
            std::copy(idx.begin(), idx.end(), nb.begin());
            nb[js] += wj > 0.0 ? 1 : -1;
            const double coeff = std::abs(wj) / dom.h[js];
            diag += coeff;
            row.emplace_back(dom.node_id(nb), -coeff);
        }

        const double q = spec.potential.eval(x);
        if (q < -1e-12)
            throw std::invalid_argument("assemble requires Q >= 0 on the grid");
        diag += q;
        op.q_diag[static_cast<std::size_t>(r)] = q;

        row.emplace_back(center, diag);
        std::sort(row.begin(), row.end());
        // Merge duplicate node references, then split interior/boundary.
        for (std::size_t k = 0; k < row.size();) {
            std::int64_t id = row[k].first;
            double acc = 0.0;
            while (k < row.size() && row[k].first == id) {
                acc += row[k].second;
                ++k;
            }
            dom.node_index(id, nb);
            if (dom.is_interior(nb)) {
                op.interior.col.push_back(static_cast<std::int32_t>(dom.interior_row(nb)));
                op.interior.val.push_back(acc);
            } else {
                op.boundary.col.push_back(static_cast<std::int32_t>(id));
                op.boundary.val.push_back(acc);
            }
        }
        op.interior.row_ptr.push_back(static_cast<std::int64_t>(op.interior.col.size()));
        op.boundary.row_ptr.push_back(static_cast<std::int64_t>(op.boundary.col.size()));
    }
    return op;
}

}  // namespace lioulab
